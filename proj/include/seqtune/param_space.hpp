#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "seqtune/rng.hpp"

namespace seqtune {

enum class ParamKind { continuous, integer, categorical, log2 };

// One search-space dimension. log2 dimensions are sampled uniformly in the
// exponent and exponentiated, e.g. lambda = 2^x with x in [-15, 15].
struct ParamDef {
    std::string name;
    ParamKind kind = ParamKind::continuous;
    double lo = 0.0, hi = 0.0;        // continuous bounds or log2 exponent bounds
    std::int64_t ilo = 0, ihi = 0;    // integer bounds, both inclusive
    std::vector<std::string> levels;  // categorical values

    static ParamDef make_continuous(std::string name, double lo, double hi);
    static ParamDef make_integer(std::string name, std::int64_t lo, std::int64_t hi);
    static ParamDef make_categorical(std::string name, std::vector<std::string> levels);
    static ParamDef make_log2(std::string name, double lo_exp, double hi_exp);
};

class ParamSpace {
public:
    ParamSpace() = default;
    // throws std::invalid_argument on duplicate names or bad per-dimension bounds
    explicit ParamSpace(std::vector<ParamDef> params);

    const std::vector<ParamDef>& params() const { return params_; }
    const ParamDef* find(const std::string& name) const;

private:
    std::vector<ParamDef> params_;
};

using ParamValue = std::variant<double, std::int64_t, std::string>;

struct Config {
    int id = 0;
    std::map<std::string, ParamValue> values;

    double get_real(const std::string& name) const;
    std::int64_t get_int(const std::string& name) const;
    const std::string& get_cat(const std::string& name) const;
};

// Each dimension sampled independently and uniformly over its domain.
Config sample_config(const ParamSpace& space, Rng& rng, int id);

// true iff cfg has exactly the space's names and every value is in-domain.
bool validate_config(const ParamSpace& space, const Config& cfg);

std::string to_string(const ParamValue& v);

}  // namespace seqtune
