#ifndef QVORTEX_IO_HPP
#define QVORTEX_IO_HPP

#include <string>
#include <string_view>

namespace qvortex {

// Shortest round-trip decimal form; identical input gives identical text.
std::string format_double(double x);

// Lowercase hex SHA-256 of a byte string or of a file's content.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

// Writes through a temporary sibling and renames it into place.
void write_file_atomically(const std::string& path, std::string_view content);

}  // namespace qvortex

#endif
