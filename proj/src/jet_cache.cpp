#include "pucci_forge/jet_cache.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace pucci {

namespace {

class Writer {
 public:
  void u32(std::uint32_t v) { bytes(v, 4); }
  void u64(std::uint64_t v) { bytes(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  const std::vector<char>& data() const { return buf_; }
  void raw(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }

 private:
  void bytes(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> buf) : buf_(std::move(buf)) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(bytes(4)); }
  std::uint64_t u64() { return bytes(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  void raw(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw std::runtime_error("jet cache: file is truncated");
  }
  std::uint64_t bytes(int n) {
    need(n);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += n;
    return v;
  }
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

std::size_t record_doubles(int d) { return 1 + d + 2 + d + d * (d + 1) / 2; }

}  // namespace

void save_sample(const std::string& path, const JetSample& sample) {
  const int d = sample.candidate.dim;
  Writer w;
  w.raw(kJetCacheMagic, sizeof kJetCacheMagic);
  w.u32(static_cast<std::uint32_t>(sample.candidate.id));
  w.u32(static_cast<std::uint32_t>(d));
  w.f64(sample.candidate.alpha);
  w.u64(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& p = sample.points[i];
    const auto& j = sample.jets[i];
    w.f64(p.t);
    for (int k = 0; k < d; ++k) w.f64(p.x(k));
    w.f64(j.value);
    w.f64(j.ut);
    for (int k = 0; k < d; ++k) w.f64(j.grad(k));
    for (int c = 0; c < d; ++c)
      for (int r = 0; r <= c; ++r) w.f64(j.hess(r, c));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("jet cache: cannot open '" + path + "' for writing");
  out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
  if (!out) throw std::runtime_error("jet cache: write to '" + path + "' failed");
}

JetSample load_sample(const std::string& path, const CandidateSpec& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("jet cache: cannot open '" + path + "'");
  Reader r(std::vector<char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));

  char magic[sizeof kJetCacheMagic];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kJetCacheMagic, sizeof magic) != 0) throw std::runtime_error("jet cache: bad magic");
  const auto id = r.u32();
  const auto d = static_cast<int>(r.u32());
  const double alpha = r.f64();
  const auto count = r.u64();
  if (id != static_cast<std::uint32_t>(expected.id) || d != expected.dim ||
      (expected.id == CandidateId::Measurable2D && alpha != expected.alpha))
    throw std::runtime_error("jet cache: '" + path + "' holds a different candidate");
  if (r.remaining() != count * record_doubles(d) * 8) throw std::runtime_error("jet cache: body size mismatch");

  JetSample s;
  s.candidate = expected;
  s.points.resize(count);
  s.jets.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto& p = s.points[i];
    auto& j = s.jets[i];
    p.t = r.f64();
    p.x.resize(d);
    for (int k = 0; k < d; ++k) p.x(k) = r.f64();
    j.value = r.f64();
    j.ut = r.f64();
    j.grad.resize(d);
    for (int k = 0; k < d; ++k) j.grad(k) = r.f64();
    j.hess = SymMatrix<double>(d);
    for (int c = 0; c < d; ++c)
      for (int row = 0; row <= c; ++row) j.hess.set(row, c, r.f64());
  }
  return s;
}

JetSample cached_sample(const std::string& path, const CandidateSpec& c, int count, double exclusion) {
  if (!path.empty() && std::filesystem::exists(path)) {
    auto s = load_sample(path, c);
    if (s.size() == static_cast<std::size_t>(count)) return s;
  }
  auto s = build_sample(c, count, exclusion);
  if (!path.empty()) save_sample(path, s);
  return s;
}

}  // namespace pucci
