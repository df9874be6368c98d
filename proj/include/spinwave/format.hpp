#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace spinwave {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// `%.17g`: fixed 17 significant digits, used by the ensemble format.
std::string format_fixed_digits(double value);

/// Writes to `<path>.tmp` then renames, so readers never see a partial file.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

}  // namespace spinwave
