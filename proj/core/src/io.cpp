#include "spulse/io.hpp"

#include "spulse/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <sstream>

namespace spulse {
namespace {

constexpr char kMagic[8] = {'S', 'P', 'F', 'L', 'D', '0', '1', '\0'};

static_assert(std::endian::native == std::endian::little, "SPFLD01 I/O assumes a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error("truncated SPFLD01 file '" + path + "'");
    return v;
}

} // namespace

void write_field(const std::string& path, const Field& u, double t) {
    if (!u.is_real()) throw InvalidArgument("write_field: only real fields are stored");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    out.write(kMagic, sizeof kMagic);
    put<std::uint64_t>(out, u.size());
    put<double>(out, t);
    std::vector<double> buf(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) buf[j] = u[j].real();
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (!out) throw Error("write failed for '" + path + "'");
}

StoredField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw Error("'" + path + "' is not an SPFLD01 file");
    const auto n = get<std::uint64_t>(in, path);
    StoredField f;
    f.t = get<double>(in, path);
    if (n == 0 || n > (std::uint64_t{1} << 34)) throw Error("implausible length in '" + path + "'");
    f.values.resize(n);
    if (!in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(n * sizeof(double))))
        throw Error("truncated SPFLD01 file '" + path + "'");
    return f;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& hash, const std::vector<std::string>& header)
    : out_(path, std::ios::trunc), path_(path), columns_(header.size()) {
    if (!out_) throw Error("cannot write '" + path + "'");
    out_ << "# config_hash: " << hash << "\n";
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw InvalidArgument("CsvWriter: row width does not match header in " + path_);
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw Error("write failed for '" + path_ + "'");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace spulse
