#pragma once

#include "debias/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace debias {

// Shortest round-trip decimal form (std::to_chars), so serialized numbers are
// byte-stable and parse back bit-exactly.
std::string format_double(double v);
double parse_double(std::string_view s, const char* context);

// Writes via a temporary file in the same directory followed by an atomic
// rename, so readers never see partial content and failures leave no file.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

// CSV with header `user,item,value`; indices are 1-based in the file.
std::string observed_to_csv(const ObservedDataset& d);
ObservedDataset observed_from_csv(std::string_view text, QuantizationSpec spec);
void write_observed(const std::filesystem::path& path, const ObservedDataset& d);
ObservedDataset read_observed(const std::filesystem::path& path, QuantizationSpec spec);

// Dense dump with a one-line header `num_users,num_items`, then one CSV row
// per user.
std::string matrix_to_csv(const RatingMatrix& m);
RatingMatrix matrix_from_csv(std::string_view text);
void write_matrix(const std::filesystem::path& path, const RatingMatrix& m);
RatingMatrix read_matrix(const std::filesystem::path& path);

}  // namespace debias
