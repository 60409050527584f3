#include "lscreen/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

namespace lscreen::io {
namespace {

template <class T>
T to_little_endian(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&v, bytes, sizeof(T));
  }
  return v;
}

template <class T>
void put(std::ostream& os, T v) {
  v = to_little_endian(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(Errc::IoError, "truncated binary matrix header");
  return to_little_endian(v);
}

void read_doubles(std::istream& is, double* out, std::size_t count) {
  is.read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) fail(Errc::IoError, "truncated binary matrix payload");
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t k = 0; k < count; ++k) out[k] = to_little_endian(out[k]);
  }
}

struct BinaryHeader {
  std::uint64_t n = 0;
  std::uint64_t p = 0;
};

BinaryHeader read_header(std::istream& is, const std::filesystem::path& path) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) fail(Errc::IoError, path.string() + ": bad magic");
  const auto version = get<std::uint32_t>(is);
  if (version != kBinaryVersion) fail(Errc::IoError, path.string() + ": unsupported version");
  BinaryHeader h;
  h.n = get<std::uint64_t>(is);
  h.p = get<std::uint64_t>(is);
  return h;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& token, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (trim(token.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  fail(Errc::IoError, context + ": cannot parse number '" + token + "'");
}

Matrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(t);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_double(trim(cell), path.string()));
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(Errc::IoError, path.string() + ": ragged CSV rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(Errc::IoError, path.string() + ": empty CSV");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  return m;
}

bool has_binary_magic(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  return in && std::memcmp(magic, kMagic, 4) == 0;
}

}  // namespace

MatrixFormat format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv" ? MatrixFormat::Csv : MatrixFormat::Binary;
}

Matrix read_matrix(const std::filesystem::path& path) {
  if (!has_binary_magic(path)) return read_csv(path);
  std::ifstream in(path, std::ios::binary);
  const BinaryHeader h = read_header(in, path);
  Matrix m(static_cast<Index>(h.n), static_cast<Index>(h.p));
  read_doubles(in, m.data(), static_cast<std::size_t>(h.n * h.p));
  return m;
}

Vector read_vector(const std::filesystem::path& path) {
  const Matrix m = read_matrix(path);
  if (m.cols() != 1) fail(Errc::IoError, path.string() + ": expected a single-column vector file");
  return m.col(0);
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << m(r, c);
    }
    out << '\n';
  }
  if (!out) fail(Errc::IoError, "write failed for " + path.string());
}

void write_matrix_binary(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kBinaryVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.size(); ++i) put<double>(out, m.data()[i]);
  if (!out) fail(Errc::IoError, "write failed for " + path.string());
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  if (format_for_path(path) == MatrixFormat::Csv) {
    write_matrix_csv(path, m);
  } else {
    write_matrix_binary(path, m);
  }
}

void write_vector(const std::filesystem::path& path, const Vector& v) { write_matrix(path, Matrix(v)); }

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(Errc::IoError, "line " + std::to_string(lineno) + ": expected key=value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

Vector parse_vector_list(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const std::string t = trim(cell);
    if (!t.empty()) vals.push_back(parse_double(t, "vector list"));
  }
  return Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
}

std::string format_vector_list(const Vector& v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  return os.str();
}

void write_solution_file(const std::filesystem::path& path, double lambda, const Solution& sol) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "lambda=" << lambda << '\n'
      << "objective=" << sol.primal << '\n'
      << "gap=" << sol.gap << '\n'
      << "converged=" << (sol.converged ? 1 : 0) << '\n'
      << "w=" << format_vector_list(sol.w) << '\n'
      << "theta=" << format_vector_list(sol.theta) << '\n';
  if (!out) fail(Errc::IoError, "write failed for " + path.string());
}

DualSolution read_dual_solution(const std::filesystem::path& path) {
  const auto kv = read_key_values(path);
  const auto lam = kv.find("lambda");
  const auto theta = kv.find("theta");
  if (lam == kv.end() || theta == kv.end()) fail(Errc::IoError, path.string() + ": needs lambda= and theta=");
  return {parse_double(lam->second, path.string()), parse_vector_list(theta->second)};
}

// ---------------------------------------------------------------------------
// BinaryColumnReader

BinaryColumnReader::BinaryColumnReader(std::filesystem::path path, Index block_size)
    : path_(std::move(path)), block_size_(block_size) {
  require(block_size_ >= 1, Errc::InvalidArgument, "block size must be positive");
  std::ifstream in(path_, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path_.string());
  const BinaryHeader h = read_header(in, path_);
  n_ = static_cast<Index>(h.n);
  p_ = static_cast<Index>(h.p);
  require(n_ > 0 && p_ > 0, Errc::InvalidArgument, "dictionary must be nonempty");
  norms_.resize(p_);
  scan([&](Index first, const Matrix& block) {
    for (Index k = 0; k < block.cols(); ++k) {
      const double nrm = block.col(k).norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        fail(Errc::InvalidArgument, "feature " + std::to_string(first + k) + " is zero or non-finite");
      }
      norms_[first + k] = nrm;
    }
  });
}

template <class Fn>
void BinaryColumnReader::scan(Fn&& fn) const {
  std::ifstream in(path_, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path_.string());
  in.seekg(static_cast<std::streamoff>(kHeaderBytes));
  Matrix block;
  for (Index first = 0; first < p_; first += block_size_) {
    const Index cols = std::min(block_size_, p_ - first);
    block.resize(n_, cols);
    read_doubles(in, block.data(), static_cast<std::size_t>(n_ * cols));
    Index prev = peak_resident_.load();
    while (cols > prev && !peak_resident_.compare_exchange_weak(prev, cols)) {
    }
    fn(first, block);
  }
  ++passes_;
}

Matrix BinaryColumnReader::inner_products(const Matrix& probes) const {
  require(probes.rows() == n_, Errc::DimensionMismatch, "probe length differs from feature dimension");
  Matrix out(p_, probes.cols());
  scan([&](Index first, const Matrix& block) {
    for (Index k = 0; k < block.cols(); ++k) {
      for (Index j = 0; j < probes.cols(); ++j) out(first + k, j) = block.col(k).dot(probes.col(j));
    }
  });
  return out;
}

Vector BinaryColumnReader::column(Index i) const {
  require(i >= 0 && i < p_, Errc::IndexOutOfRange, "feature index out of range");
  std::ifstream in(path_, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path_.string());
  in.seekg(static_cast<std::streamoff>(kHeaderBytes + static_cast<std::uint64_t>(i) * n_ * sizeof(double)));
  Vector col(n_);
  read_doubles(in, col.data(), static_cast<std::size_t>(n_));
  return col;
}

}  // namespace lscreen::io
