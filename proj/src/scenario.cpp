#include "vwflow/scenario.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "vwflow/errors.hpp"

namespace vwflow {

namespace {

struct Token {
    std::string_view text;
    int column;  // 1-based column of text[0]
};

std::string_view trim(std::string_view s, int& column) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
        ++column;
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Splits at commas outside parentheses.
std::vector<Token> split_list(Token value) {
    std::vector<Token> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= value.text.size(); ++i) {
        const bool end = i == value.text.size();
        if (!end && value.text[i] == '(') ++depth;
        if (!end && value.text[i] == ')') --depth;
        if (end || (value.text[i] == ',' && depth == 0)) {
            int col = value.column + static_cast<int>(start);
            const std::string_view piece = trim(value.text.substr(start, i - start), col);
            parts.push_back({piece, col});
            start = i + 1;
        }
    }
    return parts;
}

class Reader {
public:
    explicit Reader(int line) : line_(line) {}

    Expression expression(Token tok) const {
        if (tok.text.empty()) throw ParseError("empty expression", line_, tok.column);
        return Expression::parse(tok.text, line_, tok.column - 1);
    }

    double number(Token tok) const {
        const auto value = expression(tok).constant_value();
        if (!value) throw ParseError("expected a constant", line_, tok.column);
        if (!std::isfinite(*value)) throw ParseError("constant is not finite", line_, tok.column);
        return *value;
    }

    long integer(Token tok) const {
        const double v = number(tok);
        if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ParseError("expected an integer", line_, tok.column);
        return static_cast<long>(v);
    }

    std::vector<double> numbers(Token tok, std::size_t expected) const {
        std::vector<double> out;
        const auto parts = split_list(tok);
        if (expected != 0 && parts.size() != expected)
            throw ParseError("expected " + std::to_string(expected) + " comma-separated values", line_, tok.column);
        for (const auto& p : parts) out.push_back(number(p));
        return out;
    }

    std::pair<Expression, Expression> expression_pair(Token tok) const {
        const auto parts = split_list(tok);
        if (parts.size() != 2) throw ParseError("expected two comma-separated expressions", line_, tok.column);
        return {expression(parts[0]), expression(parts[1])};
    }

    bool boolean(Token tok) const {
        if (tok.text == "true") return true;
        if (tok.text == "false") return false;
        throw ParseError("expected true or false", line_, tok.column);
    }

private:
    int line_;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw SemanticError(message);
}

void validate(const Scenario& s, bool has_path) {
    require(s.horizon >= 0.0, "horizon T must be >= 0");
    require(s.dt > 0.0, "dt must be > 0");
    require(s.output_times >= 1, "output_times must be >= 1");
    require(s.ensemble.radius > 0.0, "ensemble radius R must be > 0");
    require(s.ensemble.spacing > 0.0, "ensemble spacing h must be > 0");
    require(!s.levels.empty(), "levels must not be empty");
    require(s.reference_level >= 1, "reference_level must be >= 1");
    for (long n : s.levels) {
        require(n >= 1, "levels must be >= 1");
        require(n <= s.reference_level, "levels must not exceed reference_level");
    }
    require(!s.field.sup_norm || *s.field.sup_norm >= 0.0, "field sup_norm must be >= 0");
    require(!s.field.div_sup_integral || *s.field.div_sup_integral >= 0.0, "field div_sup_integral must be >= 0");
    require(has_path, "path required");
    if (s.path.source == PathSource::samples) {
        const auto& smp = s.path.samples;
        require(smp.front()[0] == 0.0, "path samples must start at t = 0");
        require(smp.back()[0] == s.horizon, "path samples must end at the horizon");
        for (std::size_t k = 1; k < smp.size(); ++k)
            require(smp[k][0] > smp[k - 1][0], "path sample times must increase");
    }
    if (s.path.source == PathSource::expression)
        for (const Expression* e : {&s.path.z1, &s.path.z2})
            require(!e->depends_on(Variable::x1) && !e->depends_on(Variable::x2),
                    "path position may only depend on t");
    require(s.path.resolution >= 1, "path resolution must be >= 1");
    require(!s.path.lipschitz_bound || *s.path.lipschitz_bound >= 0.0, "path lipschitz_bound must be >= 0");
    if (s.path.source == PathSource::from_vortexwave)
        require(s.vortexwave.has_value(), "path source from_vortexwave needs a [vortexwave] section");
    if (s.vortexwave) {
        const auto& vw = *s.vortexwave;
        require(!vw.omega0.depends_on(Variable::t), "vortexwave omega0 may only depend on x1, x2");
        require(vw.blob_spacing > 0.0, "vortexwave blob_spacing must be > 0");
        require(vw.delta_blob > 0.0, "vortexwave delta_blob must be > 0");
        require(vw.window.x_max > vw.window.x_min && vw.window.y_max > vw.window.y_min,
                "vortexwave window must be non-empty");
        require(!vw.dt || *vw.dt > 0.0, "vortexwave dt must be > 0");
        require(!vw.deposit_spacing || *vw.deposit_spacing > 0.0, "vortexwave deposit_spacing must be > 0");
        require(vw.snapshots >= 1, "vortexwave snapshots must be >= 1");
    }
    if (s.diagnostics.density_spacing) require(*s.diagnostics.density_spacing > 0.0, "density_spacing must be > 0");
    require(s.diagnostics.time_samples >= 1, "time_samples must be >= 1");
    require(s.diagnostics.space_divisions >= 1, "space_divisions must be >= 1");
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    Scenario s;
    s.levels.clear();
    std::optional<double> horizon, dt, spacing, radius;
    std::optional<std::vector<long>> levels;
    bool has_velocity = false;
    bool has_path = false;
    std::string section;
    std::set<std::string> seen;
    static const std::set<std::string> kSections{"", "field", "path", "ensemble", "vortexwave", "diagnostics"};

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view raw = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        int col = 1;
        const std::string_view line = trim(raw, col);
        if (line.empty()) {
            if (eol == text.size()) break;
            continue;
        }

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("expected ']'", line_no, col + static_cast<int>(line.size()));
            section = std::string(line.substr(1, line.size() - 2));
            if (!kSections.contains(section) || section.empty())
                throw ParseError("unknown section [" + section + "]", line_no, col);
            if (section == "vortexwave" && !s.vortexwave) s.vortexwave.emplace();
            if (eol == text.size()) break;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no, col);
        int key_col = col;
        const std::string key(trim(line.substr(0, eq), key_col));
        int val_col = col + static_cast<int>(eq) + 1;
        const Token value{trim(line.substr(eq + 1), val_col), val_col};
        if (key.empty()) throw ParseError("missing key", line_no, col);
        if (value.text.empty()) throw ParseError("missing value for '" + key + "'", line_no, val_col);

        const std::string qualified = section + "." + key;
        if (key != "sample" && !seen.insert(qualified).second)
            throw ParseError("duplicate key '" + key + "'", line_no, key_col);

        const Reader r(line_no);
        auto unknown = [&] { throw ParseError("unknown key '" + key + "'", line_no, key_col); };

        if (section.empty()) {
            if (key == "name") s.name = std::string(value.text);
            else if (key == "horizon") horizon = r.number(value);
            else if (key == "dt") dt = r.number(value);
            else if (key == "output_times") s.output_times = static_cast<std::size_t>(std::max(0L, r.integer(value)));
            else if (key == "reference_level") s.reference_level = r.integer(value);
            else if (key == "levels") {
                levels.emplace();
                for (const auto& p : split_list(value)) levels->push_back(r.integer(p));
            } else unknown();
        } else if (section == "field") {
            if (key == "velocity") {
                std::tie(s.field.v1, s.field.v2) = r.expression_pair(value);
                has_velocity = true;
            } else if (key == "divergence") s.field.divergence = r.expression(value);
            else if (key == "sup_norm") s.field.sup_norm = r.number(value);
            else if (key == "div_sup_integral") s.field.div_sup_integral = r.number(value);
            else if (key == "already_smooth") s.field.already_smooth = r.boolean(value);
            else unknown();
        } else if (section == "path") {
            auto claim = [&](PathSource src) {
                if (has_path && s.path.source != src)
                    throw ParseError("path already defined by another source", line_no, key_col);
                has_path = true;
                s.path.source = src;
            };
            if (key == "position") {
                claim(PathSource::expression);
                std::tie(s.path.z1, s.path.z2) = r.expression_pair(value);
            } else if (key == "sample") {
                claim(PathSource::samples);
                const auto v = r.numbers(value, 3);
                s.path.samples.push_back({v[0], v[1], v[2]});
            } else if (key == "source") {
                if (value.text != "from_vortexwave")
                    throw ParseError("path source must be from_vortexwave", line_no, value.column);
                claim(PathSource::from_vortexwave);
            } else if (key == "lipschitz_bound") s.path.lipschitz_bound = r.number(value);
            else if (key == "resolution") s.path.resolution = static_cast<std::size_t>(std::max(0L, r.integer(value)));
            else unknown();
        } else if (section == "ensemble") {
            if (key == "center") {
                const auto v = r.numbers(value, 2);
                s.ensemble.center = {v[0], v[1]};
            } else if (key == "radius") radius = r.number(value);
            else if (key == "spacing") spacing = r.number(value);
            else unknown();
        } else if (section == "vortexwave") {
            auto& vw = *s.vortexwave;
            if (key == "omega0") vw.omega0 = r.expression(value);
            else if (key == "window") {
                const auto v = r.numbers(value, 4);
                vw.window = {v[0], v[1], v[2], v[3]};
            } else if (key == "blob_spacing") vw.blob_spacing = r.number(value);
            else if (key == "delta_blob") vw.delta_blob = r.number(value);
            else if (key == "vortex") {
                const auto v = r.numbers(value, 2);
                vw.vortex = {v[0], v[1]};
            } else if (key == "strength") vw.strength = r.number(value);
            else if (key == "dt") vw.dt = r.number(value);
            else if (key == "snapshots") vw.snapshots = static_cast<std::size_t>(std::max(0L, r.integer(value)));
            else if (key == "deposit_spacing") vw.deposit_spacing = r.number(value);
            else unknown();
        } else if (section == "diagnostics") {
            if (key == "density_spacing") s.diagnostics.density_spacing = r.number(value);
            else if (key == "time_samples") s.diagnostics.time_samples = static_cast<std::size_t>(std::max(0L, r.integer(value)));
            else if (key == "space_divisions")
                s.diagnostics.space_divisions = static_cast<std::size_t>(std::max(0L, r.integer(value)));
            else unknown();
        }
        if (eol == text.size()) break;
    }

    if (!horizon) throw SemanticError("horizon T required");
    s.horizon = *horizon;
    if (!has_velocity) throw SemanticError("field velocity required");
    if (!radius) throw SemanticError("ensemble radius R required");
    s.ensemble.radius = *radius;
    s.ensemble.spacing = spacing.value_or(*radius / 64.0);
    s.dt = dt.value_or(s.horizon > 0.0 ? s.horizon / 1024.0 : 1.0);
    s.levels = levels.value_or(std::vector<long>{16, 64, 256});
    if (s.name.empty()) s.name = "scenario";
    validate(s, has_path);
    return s;
}

std::string emit_scenario(const Scenario& s) {
    std::ostringstream o;
    o << "name = " << s.name << "\n";
    o << "horizon = " << fmt(s.horizon) << "\n";
    o << "dt = " << fmt(s.dt) << "\n";
    o << "output_times = " << s.output_times << "\n";
    o << "levels = ";
    for (std::size_t i = 0; i < s.levels.size(); ++i) o << (i ? ", " : "") << s.levels[i];
    o << "\nreference_level = " << s.reference_level << "\n";

    o << "\n[field]\n";
    o << "velocity = " << s.field.v1.source() << ", " << s.field.v2.source() << "\n";
    if (s.field.divergence) o << "divergence = " << s.field.divergence->source() << "\n";
    if (s.field.sup_norm) o << "sup_norm = " << fmt(*s.field.sup_norm) << "\n";
    if (s.field.div_sup_integral) o << "div_sup_integral = " << fmt(*s.field.div_sup_integral) << "\n";
    o << "already_smooth = " << (s.field.already_smooth ? "true" : "false") << "\n";

    o << "\n[path]\n";
    switch (s.path.source) {
        case PathSource::expression:
            o << "position = " << s.path.z1.source() << ", " << s.path.z2.source() << "\n";
            break;
        case PathSource::samples:
            for (const auto& smp : s.path.samples)
                o << "sample = " << fmt(smp[0]) << ", " << fmt(smp[1]) << ", " << fmt(smp[2]) << "\n";
            break;
        case PathSource::from_vortexwave: o << "source = from_vortexwave\n"; break;
    }
    if (s.path.lipschitz_bound) o << "lipschitz_bound = " << fmt(*s.path.lipschitz_bound) << "\n";
    o << "resolution = " << s.path.resolution << "\n";

    o << "\n[ensemble]\n";
    o << "center = " << fmt(s.ensemble.center.x1) << ", " << fmt(s.ensemble.center.x2) << "\n";
    o << "radius = " << fmt(s.ensemble.radius) << "\n";
    o << "spacing = " << fmt(s.ensemble.spacing) << "\n";

    if (s.vortexwave) {
        const auto& vw = *s.vortexwave;
        o << "\n[vortexwave]\n";
        o << "omega0 = " << vw.omega0.source() << "\n";
        o << "window = " << fmt(vw.window.x_min) << ", " << fmt(vw.window.x_max) << ", " << fmt(vw.window.y_min)
          << ", " << fmt(vw.window.y_max) << "\n";
        o << "blob_spacing = " << fmt(vw.blob_spacing) << "\n";
        o << "delta_blob = " << fmt(vw.delta_blob) << "\n";
        o << "vortex = " << fmt(vw.vortex.x1) << ", " << fmt(vw.vortex.x2) << "\n";
        o << "strength = " << fmt(vw.strength) << "\n";
        if (vw.dt) o << "dt = " << fmt(*vw.dt) << "\n";
        o << "snapshots = " << vw.snapshots << "\n";
        if (vw.deposit_spacing) o << "deposit_spacing = " << fmt(*vw.deposit_spacing) << "\n";
    }

    o << "\n[diagnostics]\n";
    if (s.diagnostics.density_spacing) o << "density_spacing = " << fmt(*s.diagnostics.density_spacing) << "\n";
    o << "time_samples = " << s.diagnostics.time_samples << "\n";
    o << "space_divisions = " << s.diagnostics.space_divisions << "\n";
    return o.str();
}

std::string scenario_hash(const Scenario& scenario) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : emit_scenario(scenario)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

TimeVaryingField build_smooth_field(const Scenario& scenario) {
    const auto& spec = scenario.field;
    TimeVaryingField f;
    f.velocity = [v1 = spec.v1, v2 = spec.v2](double t, PlaneVec x) { return PlaneVec{v1(t, x.x1, x.x2), v2(t, x.x1, x.x2)}; };

    std::optional<double> div_constant;
    if (spec.divergence) {
        f.divergence = [d = *spec.divergence](double t, PlaneVec x) { return d(t, x.x1, x.x2); };
        div_constant = spec.divergence->constant_value();
    } else {
        const Expression d1 = spec.v1.derivative(Variable::x1);
        const Expression d2 = spec.v2.derivative(Variable::x2);
        f.divergence = [d1, d2](double t, PlaneVec x) { return d1(t, x.x1, x.x2) + d2(t, x.x1, x.x2); };
        if (d1.constant_value() && d2.constant_value()) div_constant = *d1.constant_value() + *d2.constant_value();
    }

    f.sup_norm = spec.sup_norm;
    if (!f.sup_norm && spec.v1.constant_value() && spec.v2.constant_value())
        f.sup_norm = std::hypot(*spec.v1.constant_value(), *spec.v2.constant_value());
    f.div_sup_integral = spec.div_sup_integral;
    if (!f.div_sup_integral && div_constant) f.div_sup_integral = std::abs(*div_constant) * scenario.horizon;
    f.already_smooth = spec.already_smooth;
    return f;
}

InitialEnsemble build_ensemble(const Scenario& scenario) {
    return make_disk_ensemble(scenario.ensemble.center, scenario.ensemble.radius, scenario.ensemble.spacing);
}

VortexWaveState build_vortexwave_state(const Scenario& scenario) {
    if (!scenario.vortexwave) throw SemanticError("scenario has no [vortexwave] section");
    const auto& vw = *scenario.vortexwave;
    VortexWaveState state;
    state.vortex = vw.vortex;
    state.strength = vw.strength;
    state.ensemble = make_blob_lattice([w = vw.omega0](PlaneVec x) { return w(0.0, x.x1, x.x2); }, vw.window,
                                       vw.blob_spacing, vw.delta_blob);
    return state;
}

std::vector<double> vortexwave_snapshot_times(const Scenario& scenario) {
    const std::size_t count = scenario.vortexwave ? scenario.vortexwave->snapshots : 2;
    return uniform_times(scenario.horizon, count);
}

PointVortexPath build_path(const Scenario& scenario, int threads) {
    const auto& spec = scenario.path;
    const double horizon = scenario.horizon;
    switch (spec.source) {
        case PathSource::samples: {
            std::vector<double> times;
            std::vector<PlaneVec> positions;
            for (const auto& smp : spec.samples) {
                times.push_back(smp[0]);
                positions.push_back({smp[1], smp[2]});
            }
            if (spec.lipschitz_bound) return PointVortexPath(times, positions, *spec.lipschitz_bound);
            return PointVortexPath::from_samples(times, positions);
        }
        case PathSource::expression: {
            const std::size_t segments = horizon > 0.0 ? spec.resolution : 0;
            std::vector<double> times;
            std::vector<PlaneVec> positions;
            for (std::size_t k = 0; k <= segments; ++k) {
                const double t = k == segments ? horizon
                                               : horizon * static_cast<double>(k) / static_cast<double>(segments);
                times.push_back(t);
                positions.push_back({spec.z1(t, 0.0, 0.0), spec.z2(t, 0.0, 0.0)});
            }
            if (spec.lipschitz_bound) return PointVortexPath(times, positions, *spec.lipschitz_bound);
            return PointVortexPath::from_samples(times, positions);
        }
        case PathSource::from_vortexwave: {
            const VortexWaveState initial = build_vortexwave_state(scenario);
            const double dt = scenario.vortexwave->dt.value_or(scenario.dt);
            return run(initial, horizon, dt, {}, threads).path;
        }
    }
    throw SemanticError("unknown path source");
}

}  // namespace vwflow
