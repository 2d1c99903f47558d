#include "vawt/runlog.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace vawt {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_runlog_row(const RunLogRow& row) {
    std::string s = std::to_string(row.eval);
    s += ',';
    s += std::to_string(row.generation);
    s += ',';
    s += std::to_string(row.species);
    s += ",\"";
    s += format_genotype(row.genotype);
    s += "\",";
    s += format_double(row.fitness_rpm);
    s += ',';
    s += format_double(row.best_rpm);
    return s;
}

RunLogWriter::RunLogWriter(const std::filesystem::path& path,
                           const std::map<std::string, std::string>& config)
    : path_(path), to_file_(true) {
    std::ofstream out(path_, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open log for writing: " + path_.string());
    for (const auto& [key, value] : config) out << "# " << key << '=' << value << '\n';
    out << kRunLogColumns << '\n';
    if (!out) throw std::runtime_error("write failed: " + path_.string());
}

void RunLogWriter::append(const RunLogRow& row) {
    rows_.push_back(row);
    if (!to_file_) return;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to log: " + path_.string());
    out << format_runlog_row(row) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("append failed: " + path_.string());
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"')
                quoted = false;
            else
                cur += c;
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted)
        throw std::runtime_error("unterminated quote in log line " + std::to_string(line_no));
    fields.push_back(cur);
    return fields;
}

double parse_double_field(const std::string& s, std::size_t line_no) {
    double v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("bad numeric field '" + s + "' in log line " +
                                 std::to_string(line_no));
    return v;
}

}  // namespace

ParsedRunLog parse_runlog_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open log: " + path.string());
    ParsedRunLog log;
    std::string line;
    std::size_t line_no = 0;
    bool saw_columns = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("bad config line " + std::to_string(line_no) + " in " +
                                         path.string());
            log.config[line.substr(2, eq - 2)] = line.substr(eq + 1);
            continue;
        }
        if (!saw_columns) {
            log.columns = line;
            if (line != kRunLogColumns)
                throw std::runtime_error("unexpected log columns in " + path.string() + ": " +
                                         line);
            saw_columns = true;
            continue;
        }
        auto fields = split_csv_row(line, line_no);
        if (fields.size() != 6)
            throw std::runtime_error("expected 6 fields in log line " + std::to_string(line_no));
        RunLogRow row;
        row.eval = static_cast<std::int64_t>(parse_double_field(fields[0], line_no));
        row.generation = static_cast<int>(parse_double_field(fields[1], line_no));
        row.species = static_cast<int>(parse_double_field(fields[2], line_no));
        row.genotype = parse_genotype(fields[3]);
        row.fitness_rpm = parse_double_field(fields[4], line_no);
        row.best_rpm = parse_double_field(fields[5], line_no);
        log.rows.push_back(row);
    }
    if (!saw_columns)
        throw std::runtime_error("log has no column header: " + path.string());
    return log;
}

}  // namespace vawt
