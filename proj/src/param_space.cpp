#include "seqtune/param_space.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "seqtune/csv.hpp"

namespace seqtune {

ParamDef ParamDef::make_continuous(std::string name, double lo, double hi) {
    ParamDef d;
    d.name = std::move(name);
    d.kind = ParamKind::continuous;
    d.lo = lo;
    d.hi = hi;
    return d;
}

ParamDef ParamDef::make_integer(std::string name, std::int64_t lo, std::int64_t hi) {
    ParamDef d;
    d.name = std::move(name);
    d.kind = ParamKind::integer;
    d.ilo = lo;
    d.ihi = hi;
    return d;
}

ParamDef ParamDef::make_categorical(std::string name, std::vector<std::string> levels) {
    ParamDef d;
    d.name = std::move(name);
    d.kind = ParamKind::categorical;
    d.levels = std::move(levels);
    return d;
}

ParamDef ParamDef::make_log2(std::string name, double lo_exp, double hi_exp) {
    ParamDef d;
    d.name = std::move(name);
    d.kind = ParamKind::log2;
    d.lo = lo_exp;
    d.hi = hi_exp;
    return d;
}

namespace {

void check_def(const ParamDef& d) {
    switch (d.kind) {
        case ParamKind::continuous:
        case ParamKind::log2:
            if (!(d.lo < d.hi))
                throw std::invalid_argument("param '" + d.name + "': lo must be < hi");
            break;
        case ParamKind::integer:
            if (!(d.ilo < d.ihi))
                throw std::invalid_argument("param '" + d.name + "': lo must be < hi");
            break;
        case ParamKind::categorical: {
            if (d.levels.empty())
                throw std::invalid_argument("param '" + d.name + "': empty level list");
            std::set<std::string> uniq(d.levels.begin(), d.levels.end());
            if (uniq.size() != d.levels.size())
                throw std::invalid_argument("param '" + d.name + "': duplicate levels");
            break;
        }
    }
}

}  // namespace

ParamSpace::ParamSpace(std::vector<ParamDef> params) : params_(std::move(params)) {
    std::set<std::string> names;
    for (const auto& d : params_) {
        check_def(d);
        if (!names.insert(d.name).second)
            throw std::invalid_argument("duplicate parameter name '" + d.name + "'");
    }
}

const ParamDef* ParamSpace::find(const std::string& name) const {
    for (const auto& d : params_)
        if (d.name == name) return &d;
    return nullptr;
}

double Config::get_real(const std::string& name) const {
    const auto it = values.find(name);
    if (it == values.end()) throw std::out_of_range("config missing parameter '" + name + "'");
    if (const auto* p = std::get_if<double>(&it->second)) return *p;
    if (const auto* p = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*p);
    throw std::invalid_argument("parameter '" + name + "' is not numeric");
}

std::int64_t Config::get_int(const std::string& name) const {
    const auto it = values.find(name);
    if (it == values.end()) throw std::out_of_range("config missing parameter '" + name + "'");
    if (const auto* p = std::get_if<std::int64_t>(&it->second)) return *p;
    throw std::invalid_argument("parameter '" + name + "' is not an integer");
}

const std::string& Config::get_cat(const std::string& name) const {
    const auto it = values.find(name);
    if (it == values.end()) throw std::out_of_range("config missing parameter '" + name + "'");
    if (const auto* p = std::get_if<std::string>(&it->second)) return *p;
    throw std::invalid_argument("parameter '" + name + "' is not categorical");
}

Config sample_config(const ParamSpace& space, Rng& rng, int id) {
    Config cfg;
    cfg.id = id;
    for (const auto& d : space.params()) {
        switch (d.kind) {
            case ParamKind::continuous:
                cfg.values[d.name] = rng.uniform(d.lo, d.hi);
                break;
            case ParamKind::integer:
                cfg.values[d.name] = rng.uniform_int(d.ilo, d.ihi);
                break;
            case ParamKind::categorical:
                cfg.values[d.name] =
                    d.levels[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(d.levels.size()) - 1))];
                break;
            case ParamKind::log2:
                cfg.values[d.name] = std::exp2(rng.uniform(d.lo, d.hi));
                break;
        }
    }
    return cfg;
}

bool validate_config(const ParamSpace& space, const Config& cfg) {
    if (cfg.values.size() != space.params().size()) return false;
    for (const auto& d : space.params()) {
        const auto it = cfg.values.find(d.name);
        if (it == cfg.values.end()) return false;
        const ParamValue& v = it->second;
        switch (d.kind) {
            case ParamKind::continuous: {
                const auto* p = std::get_if<double>(&v);
                if (!p || *p < d.lo || *p > d.hi) return false;
                break;
            }
            case ParamKind::integer: {
                const auto* p = std::get_if<std::int64_t>(&v);
                if (!p || *p < d.ilo || *p > d.ihi) return false;
                break;
            }
            case ParamKind::categorical: {
                const auto* p = std::get_if<std::string>(&v);
                if (!p) return false;
                bool found = false;
                for (const auto& lv : d.levels) found = found || lv == *p;
                if (!found) return false;
                break;
            }
            case ParamKind::log2: {
                const auto* p = std::get_if<double>(&v);
                if (!p || !(*p > 0)) return false;
                const double x = std::log2(*p);
                // allow one ulp of slack at the exponent bounds
                if (x < d.lo - 1e-12 || x > d.hi + 1e-12) return false;
                break;
            }
        }
    }
    return true;
}

std::string to_string(const ParamValue& v) {
    if (const auto* p = std::get_if<double>(&v)) return format_double(*p);
    if (const auto* p = std::get_if<std::int64_t>(&v)) return std::to_string(*p);
    return std::get<std::string>(v);
}

}  // namespace seqtune
