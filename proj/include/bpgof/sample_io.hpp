#pragma once

#include "bpgof/bpd.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace bpgof {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// rows of nonnegative counts, row-major
struct CountTable {
    std::size_t columns = 0;
    std::vector<std::uint32_t> data;

    std::size_t rows() const noexcept { return columns == 0 ? 0 : data.size() / columns; }
};

// Comma or whitespace separated; a non-numeric first row is taken as a header.
// Blank lines and lines starting with '#' are skipped.
CountTable read_count_table(std::istream& in);
CountTable read_count_file(const std::string& path);

BivariateCountSample to_bivariate(const CountTable& t);
CountSampleD to_dsample(const CountTable& t);

void write_counts(std::ostream& out, const BivariateCountSample& s);
void write_counts(std::ostream& out, const CountSampleD& s);

} // namespace bpgof
