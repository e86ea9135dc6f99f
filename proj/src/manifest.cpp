#include "pcaret/manifest.hpp"

#include "pcaret/hash.hpp"
#include "pcaret/wire.hpp"

namespace pcaret::manifest {

Builder::Builder(std::string subcommand, std::uint64_t root_seed) {
    doc_["tool"] = kToolName;
    doc_["tool_version"] = kToolVersion;
    doc_["manifest_version"] = kFormatVersion;
    doc_["subcommand"] = std::move(subcommand);
    doc_["root_seed"] = root_seed;
    doc_["config"] = nlohmann::json::object();
    doc_["inputs"] = nlohmann::json::object();
    doc_["outputs"] = nlohmann::json::object();
}

void Builder::set_config(nlohmann::json config) {
    doc_["config"] = std::move(config);
}

void Builder::add_input(const std::string& label, const std::string& path) {
    auto digest = sha256_file(path);
    doc_["inputs"][label] = {
        {"path", path},
        {"sha256", to_hex(digest)},
    };
}

void Builder::add_output(const std::string& label, const std::string& path,
                         bool is_volatile) {
    nlohmann::json entry{{"path", path}, {"volatile", is_volatile}};
    if (!is_volatile) {
        entry["sha256"] = to_hex(sha256_file(path));
    }
    doc_["outputs"][label] = std::move(entry);
}

nlohmann::json Builder::build() const {
    return doc_;
}

void Builder::write(const std::string& path) const {
    std::string text = doc_.dump(2);
    text.push_back('\n');
    wire::write_file_atomic(path, std::span<const std::uint8_t>(
                                      reinterpret_cast<const std::uint8_t*>(text.data()),
                                      text.size()));
}

} // namespace pcaret::manifest
