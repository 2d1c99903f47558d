#include "vawt/hw_exchange.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "vawt/mesh.hpp"

namespace vawt {

HwExchange::HwExchange(std::filesystem::path dir, std::chrono::milliseconds poll,
                       std::chrono::milliseconds timeout)
    : dir_(std::move(dir)), poll_(poll), timeout_(timeout) {
    std::filesystem::create_directories(dir_);
    std::filesystem::path lock_path = dir_ / ".lock";
    lock_fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
    if (lock_fd_ < 0) throw HwProtocolError("cannot open lock file " + lock_path.string());
    if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(lock_fd_);
        lock_fd_ = -1;
        throw HwProtocolError("exchange directory " + dir_.string() +
                              " is already held by another evaluator");
    }
}

HwExchange::~HwExchange() {
    if (lock_fd_ >= 0) {
        ::flock(lock_fd_, LOCK_UN);
        ::close(lock_fd_);
    }
}

namespace {

// results.csv rows are `id,rpm`; a header row `id,rpm` is tolerated. Only
// newline-terminated rows are parsed so a row the operator is still writing
// does not read as malformed.
std::map<std::string, double> read_results(const std::filesystem::path& path) {
    std::map<std::string, double> out;
    std::ifstream in(path, std::ios::binary);
    if (!in) return out;
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t complete = all.rfind('\n');
    if (complete == std::string::npos) return out;
    std::istringstream lines(all.substr(0, complete + 1));
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        if (line.back() == '\r') line.pop_back();
        if (line == "id,rpm") continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw HwProtocolError("malformed results row (no comma): '" + line + "'");
        std::string id = line.substr(0, comma);
        std::string value = line.substr(comma + 1);
        double rpm{};
        auto res = std::from_chars(value.data(), value.data() + value.size(), rpm);
        if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(rpm))
            throw HwProtocolError("malformed rpm for id " + id + ": '" + value + "'");
        if (rpm < 0)
            throw HwProtocolError("negative rpm for id " + id + ": " + value);
        out[id] = rpm;
    }
    return out;
}

}  // namespace

std::vector<std::pair<std::string, double>> HwExchange::evaluate(
    const std::vector<std::pair<std::string, TriMesh>>& batch) {
    std::filesystem::path manifest = dir_ / "manifest.csv";
    bool fresh = !std::filesystem::exists(manifest);
    std::ofstream mf(manifest, std::ios::app);
    if (!mf) throw HwProtocolError("cannot append to " + manifest.string());
    if (fresh) mf << "id,stl_path,status\n";
    for (const auto& [id, mesh] : batch) {
        std::filesystem::path stl_path = dir_ / (id + ".stl");
        write_stl_file(stl_path, mesh, StlFormat::binary);
        mf << id << ',' << stl_path.filename().string() << ",pending\n";
    }
    mf.flush();
    if (!mf) throw HwProtocolError("write to " + manifest.string() + " failed");

    auto deadline = std::chrono::steady_clock::now() + timeout_;
    std::filesystem::path results = dir_ / "results.csv";
    for (;;) {
        auto have = read_results(results);
        std::vector<std::string> missing;
        for (const auto& [id, mesh] : batch)
            if (!have.count(id)) missing.push_back(id);
        if (missing.empty()) {
            std::vector<std::pair<std::string, double>> out;
            out.reserve(batch.size());
            for (const auto& [id, mesh] : batch) out.emplace_back(id, have[id]);
            return out;
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            std::string names;
            for (const auto& id : missing) {
                if (!names.empty()) names += ", ";
                names += id;
            }
            throw HwTimeoutError(missing, "timed out waiting for results of: " + names);
        }
        std::this_thread::sleep_for(poll_);
    }
}

namespace {

TriMesh genotype_mesh(const Genotype& g, int smooth_steps) {
    return smooth(extract_surface(build_grid(g)), smooth_steps);
}

}  // namespace

double HwSingleEvaluator::evaluate(const Genotype& g) {
    std::string id = "e" + std::to_string(++counter_);
    auto results = exchange_.evaluate({{id, genotype_mesh(g, smooth_steps_)}});
    return results[0].second;
}

FitnessResult HwPairEvaluator::evaluate(const Genotype& west, const Genotype& east) {
    ++counter_;
    std::string base = "e" + std::to_string(counter_);
    auto results = exchange_.evaluate({{base + "_a", genotype_mesh(west, smooth_steps_)},
                                       {base + "_b", genotype_mesh(east, smooth_steps_)}});
    double a = results[0].second, b = results[1].second;
    return {a + b, {a, b}};
}

}  // namespace vawt
