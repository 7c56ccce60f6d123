#pragma once

#include "hofer/ak_forge.hpp"
#include "hofer/diophantine.hpp"
#include "hofer/map_expr.hpp"

#include <json.hpp>

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace hofer::io {

using Json = nlohmann::json;

// Throws ConfigError naming the first key of `obj` outside `allowed`.
void reject_unknown(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where);

Rational rational_of(const Json& v, std::string_view where);
Manifold manifold_of(const Json& v);
GridSpec grid_of(const Json& v);
GridSpec parse_grid_flag(std::string_view text);  // "NxM"
IntegratorParams integrator_of(const Json& v, IntegratorParams base = {});
PlateauProfile profile_of(const Json& v);
HamiltonianTerm term_of(const Json& v);
HamiltonianSpec hamiltonian_of(const Json& v, ManifoldKind m);
MapExpr map_of(const Json& v, ManifoldKind m, const IntegratorParams& ip);
Json to_json(const MapExpr& f);
Json to_json(const HamiltonianSpec& h);

// "golden", "sqrt2", {"rational": "3/4"}, {"quadratic": {"P":..,"D":..,"Q":..}},
// {"quotients": [...]}, {"periodic": {"prefix": [...], "period": [...]}},
// {"construct": {"schedule": "c_n=n", "stages": 4, "seed": [0, 2]}}
struct AlphaSpec {
    TorusComponent value;
    std::optional<ConstructedLiouville> constructed;
};
AlphaSpec alpha_of(const Json& v);

ConjugatorSpec conjugator_of(const Json& v);
AKSchedule schedule_of(const Json& v, const IntegratorParams& ip);

// FNV-1a over the compact dump of the (key-sorted) config.
std::uint64_t config_hash(const Json& cfg);
std::string hex64(std::uint64_t v);

// %.17g, with inf/nan spelled out.
std::string num(double v);

class CsvTable {
public:
    void meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
    void header(std::vector<std::string> cols) { header_ = std::move(cols); }
    void row(std::vector<std::string> cells);
    std::string str() const;
    void write(const std::string& path) const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_json(const std::string& path, const Json& j);

}  // namespace hofer::io
