#include "bns/ensemble_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bns/util.hpp"

namespace bns {

namespace {
constexpr char kMagic[16] = {'B', 'N', 'S', 'E', 'N', 'S', 'B', 'L',
                             0,   0,   0,   0,   0,   0,   0,   0};

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void put_doubles(std::ostream& out, std::span<const double> xs) {
  for (double x : xs) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    put_u64(out, bits);
  }
}

void get_doubles(std::istream& in, std::span<double> xs) {
  for (double& x : xs) {
    std::uint64_t bits = get_u64(in);
    std::memcpy(&x, &bits, 8);
  }
}
}  // namespace

std::string ensemble_to_csv(const SimEnsemble& ensemble) {
  if (!ensemble.full())
    throw std::invalid_argument("ensemble_to_csv: needs full-path recording");
  std::ostringstream out;
  out << "path,step,time,x,sigma_sq,s,dz,dzb,dzstar\n";
  for (std::size_t pid = 0; pid < ensemble.paths.size(); ++pid) {
    const SimPath& p = ensemble.paths[pid];
    for (std::size_t k = 0; k < p.times.size(); ++k) {
      auto step_val = [&](const std::vector<double>& v) {
        return k == 0 || v.empty() ? 0.0 : v[k - 1];
      };
      out << pid << ',' << k << ',' << fmt_double(p.times[k]) << ','
          << fmt_double(p.x[k]) << ',' << fmt_double(p.sigma_sq[k]) << ','
          << fmt_double(p.s[k]) << ',' << fmt_double(step_val(p.dz)) << ','
          << fmt_double(step_val(p.dzb)) << ',' << fmt_double(step_val(p.dzstar))
          << '\n';
    }
  }
  return out.str();
}

void write_ensemble_binary(const SimEnsemble& ensemble, const std::string& path) {
  if (!ensemble.full())
    throw std::invalid_argument("write_ensemble_binary: needs full-path recording");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  std::size_t n_paths = ensemble.paths.size();
  std::size_t n_nodes = ensemble.paths.front().times.size();
  put_u64(out, n_paths);
  put_u64(out, n_nodes);
  put_doubles(out, ensemble.paths.front().times);
  for (const auto& p : ensemble.paths) put_doubles(out, p.x);
  for (const auto& p : ensemble.paths) put_doubles(out, p.sigma_sq);
  for (const auto& p : ensemble.paths) put_doubles(out, p.s);
  if (!out) throw std::runtime_error("short write: " + path);
}

BinaryEnsemble read_ensemble_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[16];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error(path + ": bad ensemble magic header");
  std::uint64_t n_paths = get_u64(in);
  std::uint64_t n_nodes = get_u64(in);
  BinaryEnsemble be;
  be.times.resize(n_nodes);
  get_doubles(in, be.times);
  auto read_block = [&](std::vector<std::vector<double>>& dst) {
    dst.assign(n_paths, std::vector<double>(n_nodes));
    for (auto& row : dst) get_doubles(in, row);
  };
  read_block(be.x);
  read_block(be.sigma_sq);
  read_block(be.s);
  if (!in) throw std::runtime_error(path + ": truncated ensemble file");
  return be;
}

}  // namespace bns
