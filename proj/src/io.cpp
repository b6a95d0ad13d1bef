#include "opg/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace opg {

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " + path.parent_path().string() + ": " +
                    ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return ss.str();
}

std::string trajectory_csv(const TrajectoryLog& log) {
  std::string out = "step,expected_reward,entropy,support_size,phi,tau_t,grad_maxnorm\n";
  for (const TrajectoryPoint& p : log.points) {
    out += std::to_string(p.step);
    out += ',';
    out += format_double(p.expected_reward);
    out += ',';
    out += format_double(p.entropy);
    out += ',';
    out += std::to_string(p.support_size);
    out += ',';
    out += format_double(p.phi);
    out += ',';
    out += format_double(p.tau_t);
    out += ',';
    out += format_double(p.grad_maxnorm);
    out += '\n';
  }
  return out;
}

}  // namespace opg
