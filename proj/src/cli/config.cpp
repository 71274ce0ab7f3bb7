#include "mcflab/cli.hpp"
#include "mcflab/errors.hpp"

#include <fstream>
#include <set>

namespace mcflab::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<std::string> read_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("config: cannot open " + path.string());
    }
    std::vector<std::string> tokens;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        const auto eq = t.find('=');
        const std::string where = path.string() + ":" + std::to_string(lineno);
        if (eq == std::string::npos) {
            throw ParseError("config: expected 'key = value' at " + where);
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParseError("config: empty key or value at " + where);
        }
        if (key.find_first_of(" \t") != std::string::npos || key[0] == '-') {
            throw ParseError("config: bad key '" + key + "' at " + where);
        }
        if (key == "config") {
            throw ParseError("config: nested config files are not supported (" + where + ")");
        }
        if (!seen.insert(key).second) {
            throw ParseError("config: key '" + key + "' repeated at " + where);
        }
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

} // namespace mcflab::cli
