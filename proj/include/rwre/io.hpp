#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rwre {

// Round-trippable text form of a double (shortest form is not needed; %.17g
// reproduces the exact bit pattern on read-back).
std::string format_full(double x);

// Creates the directory (and parents) if absent; no-op when already present.
void ensure_directory(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& body);

// One numeric column with a small key/value header. Layout:
//   # key=value          (one per metadata entry, sorted by key)
//   value                (one %.17g number per line)
// Used for sample dumps that downstream plotting or re-analysis can ingest.
struct CsvColumn {
    std::map<std::string, std::string> metadata;
    std::vector<double> values;
};

void write_csv_column(const std::string& path, const CsvColumn& column);
CsvColumn read_csv_column(const std::string& path);

}  // namespace rwre
