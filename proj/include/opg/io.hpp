#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "opg/dynamics.hpp"

namespace opg {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

// FNV-1a over the canonical dump of a config object.
std::uint64_t fnv1a_hash(const std::string& text);

// UTF-8, LF line endings. Throws IoError with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

// Header: step,expected_reward,entropy,support_size,phi,tau_t,grad_maxnorm
std::string trajectory_csv(const TrajectoryLog& log);

}  // namespace opg
