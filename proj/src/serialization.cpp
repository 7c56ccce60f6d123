#include "hofer/serialization.hpp"

#include "hofer/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hofer::io {

namespace {

[[noreturn]] void bad(std::string_view where, const std::string& what) {
    throw ConfigError(std::string(where) + ": " + what);
}

const Json& need(const Json& obj, const char* key, std::string_view where) {
    auto it = obj.find(key);
    if (it == obj.end()) bad(where, std::string("missing key '") + key + "'");
    return *it;
}

void need_object(const Json& v, std::string_view where) {
    if (!v.is_object()) bad(where, "expected an object");
}

double number(const Json& v, std::string_view where) {
    if (!v.is_number()) bad(where, "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) bad(where, "expected a finite number");
    return d;
}

double number_or(const Json& obj, const char* key, double dflt, std::string_view where) {
    auto it = obj.find(key);
    return it == obj.end() ? dflt : number(*it, std::string(where) + "." + key);
}

std::int64_t integer(const Json& v, std::string_view where) {
    if (!v.is_number_integer()) bad(where, "expected an integer");
    return v.get<std::int64_t>();
}

BigInt big_of(const Json& v, std::string_view where) {
    if (v.is_number_integer()) return BigInt(v.get<std::int64_t>());
    if (v.is_string()) {
        try {
            return BigInt(v.get<std::string>());
        } catch (const std::exception&) {
            bad(where, "not an integer: " + v.get<std::string>());
        }
    }
    bad(where, "expected an integer or a decimal string");
}

std::vector<BigInt> bigs_of(const Json& v, std::string_view where) {
    if (!v.is_array()) bad(where, "expected an array");
    std::vector<BigInt> out;
    for (const auto& x : v) out.push_back(big_of(x, where));
    return out;
}

}  // namespace

void reject_unknown(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    need_object(obj, where);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto a : allowed) ok = ok || a == it.key();
        if (!ok) bad(where, "unknown key '" + it.key() + "'");
    }
}

Rational rational_of(const Json& v, std::string_view where) {
    try {
        if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
        if (v.is_number()) return parse_rational(v.dump());
        if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        bad(where, e.what());
    }
    bad(where, "expected a number or a rational string");
}

Manifold manifold_of(const Json& v) {
    if (v.is_string()) {
        auto k = parse_manifold(v.get<std::string>());
        if (k == ManifoldKind::Plane) return Manifold::plane();
        return k == ManifoldKind::Sphere ? Manifold::sphere() : Manifold::annulus();
    }
    reject_unknown(v, {"kind", "center", "half_width"}, "manifold");
    auto k = parse_manifold(need(v, "kind", "manifold").get<std::string>());
    if (k != ManifoldKind::Plane) {
        if (v.contains("center") || v.contains("half_width")) bad("manifold", "center/half_width apply to the plane only");
        return k == ManifoldKind::Sphere ? Manifold::sphere() : Manifold::annulus();
    }
    Vec2 c{0, 0};
    if (v.contains("center")) {
        const auto& a = v["center"];
        if (!a.is_array() || a.size() != 2) bad("manifold.center", "expected [x, y]");
        c = {number(a[0], "manifold.center"), number(a[1], "manifold.center")};
    }
    double h = number_or(v, "half_width", 1.0, "manifold");
    if (!(h > 0)) bad("manifold.half_width", "must be positive");
    return Manifold::plane(c[0], c[1], h);
}

GridSpec grid_of(const Json& v) {
    reject_unknown(v, {"counts", "refinements"}, "grid");
    GridSpec g;
    if (v.contains("counts")) {
        const auto& a = v["counts"];
        if (!a.is_array()) bad("grid.counts", "expected an array");
        g.counts.clear();
        for (const auto& x : a) g.counts.push_back(static_cast<int>(integer(x, "grid.counts")));
    }
    if (v.contains("refinements")) g.refinements = static_cast<int>(integer(v["refinements"], "grid.refinements"));
    g.validate();
    return g;
}

GridSpec parse_grid_flag(std::string_view text) {
    auto x = text.find('x');
    if (x == std::string_view::npos) throw ConfigError("--grid expects NxM");
    GridSpec g;
    try {
        g.counts = {std::stoi(std::string(text.substr(0, x))), std::stoi(std::string(text.substr(x + 1)))};
    } catch (const std::exception&) {
        throw ConfigError("--grid expects NxM");
    }
    g.validate();
    return g;
}

IntegratorParams integrator_of(const Json& v, IntegratorParams ip) {
    reject_unknown(v, {"step", "tolerance", "max_iterations", "method"}, "integrator");
    ip.step = number_or(v, "step", ip.step, "integrator");
    ip.tolerance = number_or(v, "tolerance", ip.tolerance, "integrator");
    if (v.contains("max_iterations")) ip.max_iterations = static_cast<int>(integer(v["max_iterations"], "integrator.max_iterations"));
    if (v.contains("method")) {
        std::string m = v["method"].get<std::string>();
        if (m == "auto") ip.method = FlowMethod::Auto;
        else if (m == "midpoint") ip.method = FlowMethod::Midpoint;
        else bad("integrator.method", "expected 'auto' or 'midpoint'");
    }
    ip.validate();
    return ip;
}

PlateauProfile profile_of(const Json& v) {
    if (!v.is_array() || v.size() != 4) bad("profile", "expected four knots");
    PlateauProfile p;
    for (std::size_t i = 0; i < 4; ++i) p.knots[i] = number(v[i], "profile");
    p.validate();
    return p;
}

HamiltonianTerm term_of(const Json& v) {
    need_object(v, "term");
    std::string kind = need(v, "kind", "term").get<std::string>();
    std::string where = "term(" + kind + ")";
    if (kind == "action") {
        reject_unknown(v, {"kind", "coef"}, where);
        return HamiltonianTerm::action(number(need(v, "coef", where), where));
    }
    if (kind == "sphere_height") {
        reject_unknown(v, {"kind", "coef"}, where);
        return HamiltonianTerm::sphere_height(number(need(v, "coef", where), where));
    }
    if (kind == "wave") {
        reject_unknown(v, {"kind", "amplitude", "frequency", "phase", "profile"}, where);
        int q = static_cast<int>(integer(need(v, "frequency", where), where));
        if (q < 1) bad(where, "frequency must be positive");
        PlateauProfile p = v.contains("profile") ? profile_of(v["profile"]) : PlateauProfile{{0.1, 0.3, 0.7, 0.9}};
        return HamiltonianTerm::wave(number(need(v, "amplitude", where), where), q, number_or(v, "phase", 0.0, where), p);
    }
    if (kind == "bump") {
        reject_unknown(v, {"kind", "center", "radius", "peak"}, where);
        const auto& c = need(v, "center", where);
        if (!c.is_array() || c.size() != 2) bad(where, "center must be [x, y]");
        double r = number(need(v, "radius", where), where);
        if (!(r > 0)) bad(where, "radius must be positive");
        return HamiltonianTerm::bump({number(c[0], where), number(c[1], where)}, r, number(need(v, "peak", where), where));
    }
    if (kind == "quadratic") {
        reject_unknown(v, {"kind", "coef"}, where);
        return HamiltonianTerm::quadratic(number(need(v, "coef", where), where));
    }
    if (kind == "cutoff_linear") {
        reject_unknown(v, {"kind", "coef", "u0", "profile", "cross"}, where);
        std::optional<PlateauProfile> cross;
        if (v.contains("cross")) cross = profile_of(v["cross"]);
        return HamiltonianTerm::cutoff_linear(number(need(v, "coef", where), where), number_or(v, "u0", 0.0, where),
                                              profile_of(need(v, "profile", where)), cross);
    }
    bad("term", "unknown kind '" + kind + "'");
}

HamiltonianSpec hamiltonian_of(const Json& v, ManifoldKind m) {
    reject_unknown(v, {"terms", "segments"}, "hamiltonian");
    HamiltonianSpec h;
    h.manifold = m;
    auto terms_of = [](const Json& a) {
        if (!a.is_array()) bad("hamiltonian.terms", "expected an array");
        std::vector<HamiltonianTerm> ts;
        for (const auto& t : a) ts.push_back(term_of(t));
        return ts;
    };
    if (v.contains("terms") == v.contains("segments")) bad("hamiltonian", "give exactly one of 'terms' and 'segments'");
    if (v.contains("terms")) {
        h.segments.push_back({1.0, terms_of(v["terms"])});
    } else {
        for (const auto& s : v["segments"]) {
            reject_unknown(s, {"duration", "terms"}, "hamiltonian.segments");
            h.segments.push_back({number(need(s, "duration", "segment"), "segment.duration"), terms_of(need(s, "terms", "segment"))});
        }
    }
    h.validate();
    return h;
}

ConjugatorSpec conjugator_of(const Json& v) {
    reject_unknown(v, {"frequency", "amplitude", "kappa", "phase", "profile"}, "conjugator");
    ConjugatorSpec c;
    c.frequency = v.contains("frequency") ? static_cast<int>(integer(v["frequency"], "conjugator.frequency")) : 0;
    if (v.contains("amplitude") && v.contains("kappa")) bad("conjugator", "give amplitude or kappa, not both");
    c.amplitude = number_or(v, "amplitude", 0.0, "conjugator");
    if (v.contains("kappa")) c.kappa = number(v["kappa"], "conjugator.kappa");
    c.phase = number_or(v, "phase", 0.0, "conjugator");
    if (v.contains("profile")) c.profile = profile_of(v["profile"]);
    c.validate();
    return c;
}

MapExpr map_of(const Json& v, ManifoldKind m, const IntegratorParams& ip) {
    need_object(v, "map");
    std::string op = need(v, "op", "map").get<std::string>();
    std::string where = "map(" + op + ")";
    if (op == "identity") {
        reject_unknown(v, {"op"}, where);
        return MapExpr::identity(m);
    }
    if (op == "rotation") {
        reject_unknown(v, {"op", "alpha"}, where);
        const Json& a = need(v, "alpha", where);
        if (a.is_number() || a.is_string()) {
            std::string s = a.is_string() ? a.get<std::string>() : "";
            if (s != "golden" && s != "sqrt2") return MapExpr::rotation(m, rational_of(a, where));
        }
        return MapExpr::rotation(m, TorusVector{alpha_of(a).value});
    }
    if (op == "flow") {
        reject_unknown(v, {"op", "hamiltonian", "t", "integrator"}, where);
        IntegratorParams p = v.contains("integrator") ? integrator_of(v["integrator"], ip) : ip;
        return MapExpr::flow(hamiltonian_of(need(v, "hamiltonian", where), m), number_or(v, "t", 1.0, where), p);
    }
    if (op == "conjugator") {
        if (m != ManifoldKind::Annulus) bad(where, "conjugators live on the annulus");
        Json body = v;
        body.erase("op");
        ConjugatorSpec c = conjugator_of(body);
        if (c.frequency < 1) bad(where, "frequency must be positive");
        return c.map(ip);
    }
    if (op == "twist") {
        reject_unknown(v, {"op", "coeffs"}, where);
        std::vector<double> cs;
        const Json& a = need(v, "coeffs", where);
        if (!a.is_array()) bad(where, "coeffs must be an array");
        for (const auto& x : a) cs.push_back(number(x, where));
        return MapExpr::twist(m, cs);
    }
    if (op == "shear") {
        reject_unknown(v, {"op", "s"}, where);
        return MapExpr::shear(m, number(need(v, "s", where), where));
    }
    if (op == "linear") {
        reject_unknown(v, {"op", "matrix"}, where);
        if (m != ManifoldKind::Plane) bad(where, "linear maps live on the plane");
        const Json& a = need(v, "matrix", where);
        if (!a.is_array() || a.size() != 2 || !a[0].is_array() || !a[1].is_array() || a[0].size() != 2 || a[1].size() != 2)
            bad(where, "matrix must be [[a, b], [c, d]]");
        return MapExpr::linear({number(a[0][0], where), number(a[0][1], where), number(a[1][0], where), number(a[1][1], where)});
    }
    if (op == "compose") {
        reject_unknown(v, {"op", "maps"}, where);
        const Json& a = need(v, "maps", where);
        if (!a.is_array() || a.empty()) bad(where, "maps must be a non-empty array");
        std::vector<MapExpr> fs;
        for (const auto& x : a) fs.push_back(map_of(x, m, ip));
        return MapExpr::compose(std::move(fs));
    }
    if (op == "inverse") {
        reject_unknown(v, {"op", "map"}, where);
        return MapExpr::inverse(map_of(need(v, "map", where), m, ip));
    }
    if (op == "iterate") {
        reject_unknown(v, {"op", "map", "n"}, where);
        return MapExpr::iterate(map_of(need(v, "map", where), m, ip), integer(need(v, "n", where), where));
    }
    if (op == "conjugate") {
        reject_unknown(v, {"op", "by", "map"}, where);
        return MapExpr::conjugate(map_of(need(v, "by", where), m, ip), map_of(need(v, "map", where), m, ip));
    }
    bad("map", "unknown op '" + op + "'");
}

Json to_json(const HamiltonianSpec& h) {
    Json segs = Json::array();
    for (const auto& s : h.segments) {
        Json ts = Json::array();
        for (const auto& t : s.terms) {
            Json j;
            switch (t.kind) {
                case TermKind::ActionLinear: j = {{"kind", "action"}, {"coef", t.coef}}; break;
                case TermKind::SphereHeight: j = {{"kind", "sphere_height"}, {"coef", t.coef}}; break;
                case TermKind::ConjugatorWave:
                    j = {{"kind", "wave"}, {"amplitude", t.coef}, {"frequency", t.frequency}, {"phase", t.phase},
                         {"profile", t.profile.knots}};
                    break;
                case TermKind::PlaneBump:
                    j = {{"kind", "bump"}, {"center", t.center}, {"radius", t.radius}, {"peak", t.coef}};
                    break;
                case TermKind::PlaneQuadratic: j = {{"kind", "quadratic"}, {"coef", t.coef}}; break;
                case TermKind::CutoffLinear:
                    j = {{"kind", "cutoff_linear"}, {"coef", t.coef}, {"u0", t.u0}, {"profile", t.profile.knots}};
                    if (t.cross) j["cross"] = t.cross->knots;
                    break;
            }
            ts.push_back(j);
        }
        segs.push_back({{"duration", s.duration}, {"terms", ts}});
    }
    if (h.segments.size() == 1) return {{"terms", segs[0]["terms"]}};
    return {{"segments", segs}};
}

Json to_json(const MapExpr& f) {
    const auto& n = f.node();
    using K = MapExpr::Kind;
    switch (n.kind) {
        case K::Identity: return {{"op", "identity"}};
        case K::Rotation: {
            const auto& a = n.alpha.front();
            if (a.is_rational()) return {{"op", "rotation"}, {"alpha", to_string(a.offset())}};
            return {{"op", "rotation"}, {"alpha_description", a.describe()}};
        }
        case K::Flow: {
            Json ip = {{"step", n.integrator.step},
                       {"tolerance", n.integrator.tolerance},
                       {"max_iterations", n.integrator.max_iterations},
                       {"method", n.integrator.method == FlowMethod::Auto ? "auto" : "midpoint"}};
            return {{"op", "flow"}, {"hamiltonian", to_json(n.hamiltonian)}, {"t", n.time}, {"integrator", ip}};
        }
        case K::Twist: return {{"op", "twist"}, {"coeffs", n.coeffs}};
        case K::Linear:
            return {{"op", "linear"}, {"matrix", {{n.matrix.a, n.matrix.b}, {n.matrix.c, n.matrix.d}}}};
        case K::Compose: {
            Json a = Json::array();
            for (const auto& c : n.children) a.push_back(to_json(c));
            return {{"op", "compose"}, {"maps", a}};
        }
        case K::Inverse: return {{"op", "inverse"}, {"map", to_json(n.children.front())}};
        case K::Iterate: return {{"op", "iterate"}, {"map", to_json(n.children.front())}, {"n", n.count}};
    }
    return {};
}

AlphaSpec alpha_of(const Json& v) {
    auto wrap = [](ContinuedFraction cf) {
        if (cf.is_rational()) return AlphaSpec{TorusComponent::rational(frac_of(cf.value())), std::nullopt};
        return AlphaSpec{TorusComponent::irrational(std::make_shared<const ContinuedFraction>(std::move(cf))), std::nullopt};
    };
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "golden") return wrap(golden_mean());
        if (s == "sqrt2") return wrap(sqrt_two());
        return {TorusComponent::rational(frac_of(rational_of(v, "alpha"))), std::nullopt};
    }
    if (v.is_number()) return {TorusComponent::rational(frac_of(rational_of(v, "alpha"))), std::nullopt};
    need_object(v, "alpha");
    if (v.size() != 1) bad("alpha", "expected exactly one descriptor key");
    if (v.contains("rational")) return {TorusComponent::rational(frac_of(rational_of(v["rational"], "alpha.rational"))), std::nullopt};
    if (v.contains("quadratic")) {
        const Json& q = v["quadratic"];
        reject_unknown(q, {"P", "D", "Q"}, "alpha.quadratic");
        return wrap(cf_expand(QuadraticIrrational{big_of(need(q, "P", "alpha.quadratic"), "P"),
                                                  big_of(need(q, "D", "alpha.quadratic"), "D"),
                                                  big_of(need(q, "Q", "alpha.quadratic"), "Q")}));
    }
    if (v.contains("quotients")) return wrap(ContinuedFraction::finite(bigs_of(v["quotients"], "alpha.quotients")));
    if (v.contains("periodic")) {
        const Json& p = v["periodic"];
        reject_unknown(p, {"prefix", "period"}, "alpha.periodic");
        std::vector<BigInt> pre = p.contains("prefix") ? bigs_of(p["prefix"], "alpha.periodic.prefix") : std::vector<BigInt>{};
        return wrap(ContinuedFraction::periodic(pre, bigs_of(need(p, "period", "alpha.periodic"), "alpha.periodic.period")));
    }
    if (v.contains("construct")) {
        const Json& c = v["construct"];
        reject_unknown(c, {"schedule", "stages", "seed", "materialize_bits"}, "alpha.construct");
        CSchedule sch = CSchedule::parse(c.contains("schedule") ? c["schedule"].get<std::string>() : "c_n=n");
        std::vector<BigInt> seed = c.contains("seed") ? bigs_of(c["seed"], "alpha.construct.seed") : std::vector<BigInt>{0, 2};
        std::int64_t stages = c.contains("stages") ? integer(c["stages"], "alpha.construct.stages") : 4;
        std::int64_t bits = c.contains("materialize_bits") ? integer(c["materialize_bits"], "alpha.construct.materialize_bits") : 65536;
        ConstructedLiouville built = construct_exp_liouville(sch, seed, stages, bits);
        AlphaSpec out = wrap(built.cf);
        out.constructed = std::move(built);
        return out;
    }
    bad("alpha", "unknown descriptor");
}

AKSchedule schedule_of(const Json& v, const IntegratorParams& ip) {
    reject_unknown(v, {"stages", "nested", "integrator"}, "ak_build");
    AKSchedule s;
    s.integrator = v.contains("integrator") ? integrator_of(v["integrator"], ip) : ip;
    if (v.contains("nested")) s.nested = v["nested"].get<bool>();
    const Json& st = need(v, "stages", "ak_build");
    if (!st.is_array()) bad("ak_build.stages", "expected an array");
    for (const auto& x : st) {
        reject_unknown(x, {"alpha", "conjugator", "tol"}, "ak_build.stages[]");
        AKStage a;
        if (x.contains("alpha")) a.alpha = rational_of(x["alpha"], "stage.alpha");
        if (x.contains("conjugator")) a.conjugator = conjugator_of(x["conjugator"]);
        else a.conjugator.frequency = 0;
        a.tol = number(need(x, "tol", "stage"), "stage.tol");
        s.stages.push_back(a);
    }
    s.validate();
    return s;
}

std::uint64_t config_hash(const Json& cfg) {
    std::string s = cfg.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvTable::row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::logic_error("csv row width differs from the header");
    rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
    auto cell = [](const std::string& c) {
        if (c.find_first_of(",\"\n") == std::string::npos) return c;
        std::string q = "\"";
        for (char ch : c) {
            if (ch == '"') q += '"';
            q += ch;
        }
        return q + "\"";
    };
    std::ostringstream os;
    for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << "\n";
    for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << cell(header_[i]);
    os << "\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell(r[i]);
        os << "\n";
    }
    return os.str();
}

void CsvTable::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << str();
}

void write_json(const std::string& path, const Json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << "\n";
}

}  // namespace hofer::io
