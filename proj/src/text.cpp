#include "sctsn/text.hpp"

#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sctsn/model.hpp"

namespace sctsn {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void for_each_line(std::string_view text,
                   const std::function<void(std::size_t, const std::vector<std::string_view>&)>& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    std::vector<std::string_view> tokens;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        tokens.clear();
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            const auto start = i;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            if (i > start) tokens.push_back(line.substr(start, i - start));
        }
        if (!tokens.empty()) fn(line_no, tokens);
        if (end == text.size()) break;
    }
}

double parse_number(std::string_view s, std::size_t line) {
    const std::string str(s);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(str.c_str(), &end);
    if (str.empty() || end != str.c_str() + str.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ParseError(line, "invalid number '" + str + "'");
    }
    return v;
}

double parse_si(std::string_view s, std::size_t line) {
    double scale = 1.0;
    if (!s.empty()) {
        switch (s.back()) {
        case 'k': scale = 1e3; break;
        case 'M': scale = 1e6; break;
        case 'G': scale = 1e9; break;
        default: break;
        }
        if (scale != 1.0) s.remove_suffix(1);
    }
    return parse_number(s, line) * scale;
}

long long parse_integer(std::string_view s, std::size_t line) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(line, "invalid integer '" + std::string(s) + "'");
    }
    return v;
}

std::pair<std::string_view, std::string_view> split_option(std::string_view tok, std::size_t line) {
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == tok.size()) {
        throw ParseError(line, "expected key=value, got '" + std::string(tok) + "'");
    }
    return {tok.substr(0, eq), tok.substr(eq + 1)};
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

} // namespace sctsn
