#include "rwre/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rwre {

std::string format_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) {
        throw std::runtime_error("cannot create directory " + path + ": " + ec.message());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path + " for reading");
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << body;
    if (!out) {
        throw std::runtime_error("short write to " + path);
    }
}

void write_csv_column(const std::string& path, const CsvColumn& column) {
    std::ostringstream out;
    for (const auto& [key, value] : column.metadata) {
        out << "# " << key << "=" << value << "\n";
    }
    for (double v : column.values) {
        out << format_full(v) << "\n";
    }
    write_text_file(path, out.str());
}

CsvColumn read_csv_column(const std::string& path) {
    CsvColumn column;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            std::size_t start = line.find_first_not_of(" \t", 1);
            if (start == std::string::npos) {
                continue;
            }
            std::size_t eq = line.find('=', start);
            if (eq == std::string::npos) {
                throw std::runtime_error("malformed metadata line in " + path + ": " + line);
            }
            column.metadata[line.substr(start, eq - start)] = line.substr(eq + 1);
            continue;
        }
        std::size_t pos = 0;
        double v = std::stod(line, &pos);
        if (pos == 0) {
            throw std::runtime_error("malformed value line in " + path + ": " + line);
        }
        column.values.push_back(v);
    }
    return column;
}

}  // namespace rwre
