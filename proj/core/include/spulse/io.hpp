#pragma once

#include "spulse/grid.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace spulse {

/// SPFLD01: 8-byte magic "SPFLD01\0", n as u64, t as f64, then n little-endian f64.
struct StoredField {
    double t = 0.0;
    std::vector<double> values;
};

void write_field(const std::string& path, const Field& u, double t);
StoredField read_field(const std::string& path);

/// "%.17g"
std::string format_number(double v);

/// Comma-separated table whose first line is "# config_hash: <hash>"
/// followed by the mandatory header row.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& hash, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    void close();

private:
    std::ofstream out_;
    std::string path_;
    std::size_t columns_;
};

/// Writes `text` to `path`, replacing any existing file.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

} // namespace spulse
