#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>

namespace pcaret::manifest {

inline constexpr const char* kToolName = "pcaret";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr std::uint16_t kFormatVersion = 1;

// Run manifest: config, root seed, input hashes and output hashes, so
// a run can be reproduced and its deterministic outputs verified.
// Wall-clock artifacts (benchmark timings) are listed as volatile and
// carry no hash.
class Builder {
public:
    Builder(std::string subcommand, std::uint64_t root_seed);

    void set_config(nlohmann::json config);
    void add_input(const std::string& label, const std::string& path);
    void add_output(const std::string& label, const std::string& path,
                    bool is_volatile = false);

    nlohmann::json build() const;
    void write(const std::string& path) const;

private:
    nlohmann::json doc_;
};

} // namespace pcaret::manifest
