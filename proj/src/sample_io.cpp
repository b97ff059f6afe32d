#include "bpgof/sample_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace bpgof {

namespace {

std::vector<std::string> tokenize(const std::string& line)
{
    std::vector<std::string> out;
    if (line.find(',') != std::string::npos) {
        std::string cur;
        std::istringstream ss(line);
        while (std::getline(ss, cur, ',')) {
            const auto b = cur.find_first_not_of(" \t\r");
            const auto e = cur.find_last_not_of(" \t\r");
            out.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
        }
        if (!line.empty() && line.back() == ',') {
            out.emplace_back();
        }
    } else {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            out.push_back(tok);
        }
    }
    return out;
}

bool looks_numeric(const std::string& t)
{
    if (t.empty()) {
        return false;
    }
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) {
        return false;
    }
    return std::all_of(t.begin() + static_cast<long>(i), t.end(),
                       [](unsigned char c) { return std::isdigit(c) || c == '.' || c == 'e' || c == 'E'; });
}

std::uint32_t parse_count(const std::string& t, std::size_t line_no)
{
    const auto where = " at line " + std::to_string(line_no);
    if (t.empty()) {
        throw ParseError("empty field" + where);
    }
    if (t[0] == '-') {
        throw ParseError("negative count '" + t + "'" + where);
    }
    if (!std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw ParseError("not a nonnegative integer: '" + t + "'" + where);
    }
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || v > std::numeric_limits<std::uint32_t>::max()) {
        throw ParseError("count out of range: '" + t + "'" + where);
    }
    return static_cast<std::uint32_t>(v);
}

} // namespace

CountTable read_count_table(std::istream& in)
{
    CountTable t;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') {
            continue;
        }
        const auto toks = tokenize(line);
        if (first) {
            first = false;
            if (!std::all_of(toks.begin(), toks.end(), looks_numeric)) {
                t.columns = toks.size();
                continue;
            }
        }
        if (t.columns == 0) {
            t.columns = toks.size();
        }
        if (toks.size() != t.columns) {
            throw ParseError("expected " + std::to_string(t.columns) + " columns at line " + std::to_string(line_no) +
                             ", found " + std::to_string(toks.size()));
        }
        for (const auto& tok : toks) {
            t.data.push_back(parse_count(tok, line_no));
        }
    }
    if (t.data.empty()) {
        throw ParseError("no data rows");
    }
    return t;
}

CountTable read_count_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    return read_count_table(in);
}

BivariateCountSample to_bivariate(const CountTable& t)
{
    if (t.columns != 2) {
        throw ParseError("expected two columns, found " + std::to_string(t.columns));
    }
    std::vector<std::uint32_t> a, b;
    a.reserve(t.rows());
    b.reserve(t.rows());
    for (std::size_t i = 0; i < t.rows(); ++i) {
        a.push_back(t.data[2 * i]);
        b.push_back(t.data[2 * i + 1]);
    }
    return BivariateCountSample(std::move(a), std::move(b));
}

CountSampleD to_dsample(const CountTable& t)
{
    if (t.columns < 2) {
        throw ParseError("expected at least two columns");
    }
    return CountSampleD(t.columns, t.data);
}

void write_counts(std::ostream& out, const BivariateCountSample& s)
{
    out << "x1,x2\n";
    for (std::size_t i = 0; i < s.n(); ++i) {
        out << s.x1()[i] << ',' << s.x2()[i] << '\n';
    }
}

void write_counts(std::ostream& out, const CountSampleD& s)
{
    for (std::size_t k = 0; k < s.dim(); ++k) {
        out << (k ? ",x" : "x") << k + 1;
    }
    out << '\n';
    for (std::size_t i = 0; i < s.n(); ++i) {
        for (std::size_t k = 0; k < s.dim(); ++k) {
            out << (k ? "," : "") << s.at(i, k);
        }
        out << '\n';
    }
}

} // namespace bpgof
