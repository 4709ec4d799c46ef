#include "regobs/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "regobs/errors.hpp"

namespace regobs::cli {

std::string format_double(double value) {
    // Shortest decimal that round-trips to the same double.
    for (int prec = 1; prec <= 17; ++prec) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.*g", prec, value);
        if (std::strtod(buf, nullptr) == value) return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

struct KeyedValue {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

using KeyMap = std::map<std::string, KeyedValue>;

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

KeyMap tokenize(const std::string& text) {
    KeyMap map;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (map.count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key `" + key + "`");
        map[key] = KeyedValue{value, lineno, false};
    }
    return map;
}

class Reader {
public:
    explicit Reader(KeyMap map) : map_(std::move(map)) {}

    bool has(const std::string& key) const { return map_.count(key) > 0; }

    std::optional<std::string> get(const std::string& key) const {
        auto it = map_.find(key);
        if (it == map_.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        auto it = map_.find(key);
        const std::string at =
            it == map_.end() ? "" : " (line " + std::to_string(it->second.line) + ")";
        throw ConfigError("field `" + key + "`" + at + ": " + why);
    }

    double number(const std::string& key, double fallback) const {
        auto raw = get(key);
        if (!raw) return fallback;
        char* end = nullptr;
        const double v = std::strtod(raw->c_str(), &end);
        if (end == raw->c_str() || *end != '\0') fail(key, "not a number: `" + *raw + "`");
        return v;
    }

    double required_number(const std::string& key) const {
        if (!has(key)) throw ConfigError("missing required field `" + key + "`");
        return number(key, 0.0);
    }

    long integer(const std::string& key, long fallback) const {
        auto raw = get(key);
        if (!raw) return fallback;
        char* end = nullptr;
        const long v = std::strtol(raw->c_str(), &end, 10);
        if (end == raw->c_str() || *end != '\0') fail(key, "not an integer: `" + *raw + "`");
        return v;
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
        auto raw = get(key);
        if (!raw) return fallback;
        char* end = nullptr;
        const unsigned long long v = std::strtoull(raw->c_str(), &end, 10);
        if (end == raw->c_str() || *end != '\0') fail(key, "not an integer: `" + *raw + "`");
        return v;
    }

    bool boolean(const std::string& key, bool fallback) const {
        auto raw = get(key);
        if (!raw) return fallback;
        if (*raw == "true" || *raw == "1") return true;
        if (*raw == "false" || *raw == "0") return false;
        fail(key, "expected true/false");
    }

    std::string word(const std::string& key, const std::string& fallback) const {
        auto raw = get(key);
        return raw ? *raw : fallback;
    }

    std::vector<double> number_list(const std::string& key) const {
        auto raw = get(key);
        std::vector<double> out;
        if (!raw) return out;
        std::istringstream in(*raw);
        std::string tok;
        while (in >> tok) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                fail(key, "not a number in list: `" + tok + "`");
            out.push_back(v);
        }
        return out;
    }

    void check_all_used() const {
        for (const auto& [key, kv] : map_) {
            if (!kv.used)
                throw ConfigError("unknown field `" + key + "` (line " +
                                  std::to_string(kv.line) + ")");
        }
    }

private:
    KeyMap map_;
};

Rectangle read_rectangle(const Reader& r, const std::string& prefix, const Rectangle& fallback) {
    const double x0 = r.number(prefix + ".x_min", fallback.x_min);
    const double x1 = r.number(prefix + ".x_max", fallback.x_max);
    const double y0 = r.number(prefix + ".y_min", fallback.y_min);
    const double y1 = r.number(prefix + ".y_max", fallback.y_max);
    try {
        return Rectangle(x0, x1, y0, y1);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("field `" + prefix + "`: " + e.what());
    }
}

sensing::Profile read_profile(const Reader& r, const std::string& prefix) {
    const std::string kind = r.word(prefix + ".kind", "uniform");
    if (kind == "uniform") return sensing::UniformProfile{};
    if (kind == "triangle") {
        sensing::TriangleProfile tri;
        tri.peak.x = r.number(prefix + ".peak.x", 0.0);
        tri.peak.y = r.number(prefix + ".peak.y", 0.0);
        return tri;
    }
    if (kind == "tabulated") {
        sensing::TabulatedProfile tab;
        tab.rows = static_cast<std::size_t>(r.integer(prefix + ".rows", 1));
        tab.cols = static_cast<std::size_t>(r.integer(prefix + ".cols", 1));
        tab.values = r.number_list(prefix + ".values");
        try {
            tab.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("field `" + prefix + "`: " + e.what());
        }
        return tab;
    }
    r.fail(prefix + ".kind", "unknown profile kind `" + kind + "`");
}

sensing::SensorSpec read_sensor(const Reader& r, const std::string& prefix) {
    const std::string kind = r.word(prefix + ".kind", "");
    if (kind == "point") {
        return sensing::InteriorPointSensor{
            {r.required_number(prefix + ".x"), r.required_number(prefix + ".y")}};
    }
    if (kind == "boundary_point") {
        return sensing::BoundaryPointSensor{
            {r.required_number(prefix + ".x"), r.required_number(prefix + ".y")}};
    }
    if (kind == "zone") {
        sensing::InteriorZoneSensor zone;
        zone.support = read_rectangle(r, prefix + ".support", Rectangle{0, 1, 0, 1});
        zone.profile = read_profile(r, prefix + ".profile");
        return zone;
    }
    if (kind == "boundary_zone") {
        sensing::BoundaryZoneSensor seg;
        seg.start = {r.required_number(prefix + ".x0"), r.required_number(prefix + ".y0")};
        seg.end = {r.required_number(prefix + ".x1"), r.required_number(prefix + ".y1")};
        seg.profile = read_profile(r, prefix + ".profile");
        return seg;
    }
    if (kind == "filament") {
        sensing::FilamentSensor fil;
        const auto coords = r.number_list(prefix + ".polyline");
        if (coords.size() < 4 || coords.size() % 2 != 0)
            r.fail(prefix + ".polyline", "expected an even list of >= 4 coordinates");
        for (std::size_t k = 0; k + 1 < coords.size(); k += 2)
            fil.polyline.push_back({coords[k], coords[k + 1]});
        fil.weight = read_profile(r, prefix + ".weight");
        return fil;
    }
    if (kind.empty()) throw ConfigError("missing required field `" + prefix + ".kind`");
    r.fail(prefix + ".kind", "unknown sensor kind `" + kind + "`");
}

} // namespace

Scenario parse_scenario(const std::string& text) {
    Reader r(tokenize(text));
    Scenario s;

    s.domain = read_rectangle(r, "domain", s.domain);
    s.region = read_rectangle(r, "region", s.region);
    s.shift = r.number("shift", s.shift);
    s.order_x = static_cast<int>(r.integer("truncation.n1", s.order_x));
    s.order_y = static_cast<int>(r.integer("truncation.n2", s.order_y));

    if (r.has("slow.j")) {
        s.slow = strategic::SlowSpec::groups(
            static_cast<std::size_t>(r.integer("slow.j", 0)));
        if (r.has("slow.sigma_min"))
            throw ConfigError("fields `slow.j` and `slow.sigma_min` are exclusive");
    } else {
        s.slow = strategic::SlowSpec::threshold(r.number("slow.sigma_min", 0.01));
    }
    s.rank_tol = r.number("rank_tol", s.rank_tol);

    for (int idx = 0;; ++idx) {
        const std::string prefix = "sensors." + std::to_string(idx);
        if (!r.has(prefix + ".kind")) break;
        s.sensors.push_back(read_sensor(r, prefix));
    }

    const std::string gain_kind = r.word("gain.kind", "riccati");
    if (gain_kind == "riccati") s.gain.kind = Scenario::Gain::Kind::Riccati;
    else if (gain_kind == "shift") s.gain.kind = Scenario::Gain::Kind::RateShift;
    else if (gain_kind == "explicit") s.gain.kind = Scenario::Gain::Kind::Explicit;
    else r.fail("gain.kind", "unknown gain kind `" + gain_kind + "`");
    s.gain.rho = r.number("gain.rho", s.gain.rho);
    s.gain.sigma_star = r.number("gain.sigma_star", s.gain.sigma_star);
    s.gain.values = r.number_list("gain.values");
    s.gain.observable_only = r.boolean("gain.observable_only", false);

    const std::string est_kind = r.word("estimator.kind", "identity");
    if (est_kind == "identity") s.estimator.kind = Scenario::Estimator::Kind::Identity;
    else if (est_kind == "general") s.estimator.kind = Scenario::Estimator::Kind::General;
    else if (est_kind == "regional") s.estimator.kind = Scenario::Estimator::Kind::Regional;
    else r.fail("estimator.kind", "unknown estimator kind `" + est_kind + "`");
    s.estimator.rates = r.number_list("estimator.rates");
    s.estimator.injection = r.number_list("estimator.injection");

    const std::string init_kind = r.word("init.kind", "random");
    if (init_kind == "random") s.initial.kind = Scenario::Initial::Kind::Random;
    else if (init_kind == "explicit") s.initial.kind = Scenario::Initial::Kind::Explicit;
    else if (init_kind == "mode") s.initial.kind = Scenario::Initial::Kind::SingleMode;
    else r.fail("init.kind", "unknown init kind `" + init_kind + "`");
    s.initial.amplitude = r.number("init.amplitude", s.initial.amplitude);
    s.initial.values = r.number_list("init.values");
    s.initial.mode_x = static_cast<int>(r.integer("init.mode.i", 0));
    s.initial.mode_y = static_cast<int>(r.integer("init.mode.j", 0));
    s.initial.mode_value = r.number("init.mode.value", 1.0);

    const std::string w0_kind = r.word("init.w0", "zero");
    if (w0_kind == "zero") s.observer_init.kind = Scenario::ObserverInit::Kind::Zero;
    else if (w0_kind == "match") s.observer_init.kind = Scenario::ObserverInit::Kind::Match;
    else if (w0_kind == "explicit") s.observer_init.kind = Scenario::ObserverInit::Kind::Explicit;
    else r.fail("init.w0", "unknown observer init `" + w0_kind + "`");
    s.observer_init.values = r.number_list("init.w0_values");

    s.input.times = r.number_list("input.times");
    s.input.values = r.number_list("input.values");
    s.input.actuator = r.number_list("input.actuator");
    s.input.channels = static_cast<std::size_t>(r.integer("input.channels", 0));

    s.time.t_final = r.number("time.t_final", s.time.t_final);
    s.time.dt = r.number("time.dt", s.time.dt);

    s.seed = r.unsigned_integer("seed", s.seed);
    s.scan_resolution = static_cast<int>(r.integer("scan.resolution", s.scan_resolution));
    s.scan_horizon = r.number("scan.horizon", s.scan_horizon);
    s.norm_stride = static_cast<std::size_t>(r.integer("output.norm_stride", 0));
    s.tail_fraction = r.number("fit.tail_fraction", s.tail_fraction);
    s.sigma_ref = r.number("verdict.sigma_ref", 0.0);

    r.check_all_used();
    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void validate_scenario(const Scenario& s) {
    if (!s.domain.contains(s.region, 1e-12))
        throw ConfigError("field `region`: must lie inside the domain");
    if (s.order_x < 0 || s.order_y < 0)
        throw ConfigError("field `truncation`: orders must be >= 0");
    if (!(s.time.dt > 0.0))
        throw ConfigError("field `time.dt`: must be > 0");
    if (!(s.time.t_final >= s.time.dt))
        throw ConfigError("field `time.t_final`: must be >= time.dt");
    if (!(s.rank_tol > 0.0 && s.rank_tol < 1.0))
        throw ConfigError("field `rank_tol`: must lie in (0, 1)");
    if (s.scan_resolution < 2)
        throw ConfigError("field `scan.resolution`: must be >= 2");
    if (!(s.scan_horizon > 0.0))
        throw ConfigError("field `scan.horizon`: must be > 0");
    if (!(s.tail_fraction > 0.0 && s.tail_fraction <= 1.0))
        throw ConfigError("field `fit.tail_fraction`: must lie in (0, 1]");
    for (std::size_t k = 0; k < s.sensors.size(); ++k) {
        try {
            sensing::validate_sensor(s.sensors[k], s.domain);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("field `sensors." + std::to_string(k) + "`: " + e.what());
        }
    }
    if (s.input.channels > 0) {
        if (s.input.times.empty())
            throw ConfigError("field `input.times`: required when input.channels > 0");
        if (s.input.values.size() != s.input.times.size() * s.input.channels)
            throw ConfigError("field `input.values`: expected times*channels entries");
        for (std::size_t k = 0; k + 1 < s.input.times.size(); ++k)
            if (!(s.input.times[k] < s.input.times[k + 1]))
                throw ConfigError("field `input.times`: must be strictly increasing");
    }
    if (s.estimator.kind == Scenario::Estimator::Kind::General) {
        if (s.estimator.rates.empty())
            throw ConfigError("field `estimator.rates`: required for the general estimator");
        for (double rate : s.estimator.rates)
            if (!(rate < 0.0))
                throw ConfigError("field `estimator.rates`: all rates must be < 0");
    }
}

namespace {

void write_profile(std::ostringstream& out, const std::string& prefix,
                   const sensing::Profile& profile) {
    if (std::holds_alternative<sensing::UniformProfile>(profile)) {
        out << prefix << ".kind = uniform\n";
    } else if (const auto* tri = std::get_if<sensing::TriangleProfile>(&profile)) {
        out << prefix << ".kind = triangle\n";
        out << prefix << ".peak.x = " << format_double(tri->peak.x) << "\n";
        out << prefix << ".peak.y = " << format_double(tri->peak.y) << "\n";
    } else {
        const auto& tab = std::get<sensing::TabulatedProfile>(profile);
        out << prefix << ".kind = tabulated\n";
        out << prefix << ".rows = " << tab.rows << "\n";
        out << prefix << ".cols = " << tab.cols << "\n";
        out << prefix << ".values =";
        for (double v : tab.values) out << " " << format_double(v);
        out << "\n";
    }
}

void write_list(std::ostringstream& out, const std::string& key,
                const std::vector<double>& values) {
    if (values.empty()) return;
    out << key << " =";
    for (double v : values) out << " " << format_double(v);
    out << "\n";
}

} // namespace

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    auto rect = [&](const std::string& prefix, const Rectangle& r) {
        out << prefix << ".x_min = " << format_double(r.x_min) << "\n";
        out << prefix << ".x_max = " << format_double(r.x_max) << "\n";
        out << prefix << ".y_min = " << format_double(r.y_min) << "\n";
        out << prefix << ".y_max = " << format_double(r.y_max) << "\n";
    };
    rect("domain", s.domain);
    rect("region", s.region);
    out << "shift = " << format_double(s.shift) << "\n";
    out << "truncation.n1 = " << s.order_x << "\n";
    out << "truncation.n2 = " << s.order_y << "\n";
    if (s.slow.kind == strategic::SlowSpec::Kind::GroupCount)
        out << "slow.j = " << s.slow.group_count << "\n";
    else
        out << "slow.sigma_min = " << format_double(s.slow.sigma_min) << "\n";
    out << "rank_tol = " << format_double(s.rank_tol) << "\n";

    for (std::size_t k = 0; k < s.sensors.size(); ++k) {
        const std::string prefix = "sensors." + std::to_string(k);
        std::visit(
            [&](const auto& sensor) {
                using T = std::decay_t<decltype(sensor)>;
                if constexpr (std::is_same_v<T, sensing::InteriorPointSensor>) {
                    out << prefix << ".kind = point\n";
                    out << prefix << ".x = " << format_double(sensor.location.x) << "\n";
                    out << prefix << ".y = " << format_double(sensor.location.y) << "\n";
                } else if constexpr (std::is_same_v<T, sensing::BoundaryPointSensor>) {
                    out << prefix << ".kind = boundary_point\n";
                    out << prefix << ".x = " << format_double(sensor.location.x) << "\n";
                    out << prefix << ".y = " << format_double(sensor.location.y) << "\n";
                } else if constexpr (std::is_same_v<T, sensing::InteriorZoneSensor>) {
                    out << prefix << ".kind = zone\n";
                    rect(prefix + ".support", sensor.support);
                    write_profile(out, prefix + ".profile", sensor.profile);
                } else if constexpr (std::is_same_v<T, sensing::BoundaryZoneSensor>) {
                    out << prefix << ".kind = boundary_zone\n";
                    out << prefix << ".x0 = " << format_double(sensor.start.x) << "\n";
                    out << prefix << ".y0 = " << format_double(sensor.start.y) << "\n";
                    out << prefix << ".x1 = " << format_double(sensor.end.x) << "\n";
                    out << prefix << ".y1 = " << format_double(sensor.end.y) << "\n";
                    write_profile(out, prefix + ".profile", sensor.profile);
                } else {
                    out << prefix << ".kind = filament\n";
                    out << prefix << ".polyline =";
                    for (const Point& p : sensor.polyline)
                        out << " " << format_double(p.x) << " " << format_double(p.y);
                    out << "\n";
                    write_profile(out, prefix + ".weight", sensor.weight);
                }
            },
            s.sensors[k]);
    }

    out << "gain.kind = "
        << (s.gain.kind == Scenario::Gain::Kind::Riccati
                ? "riccati"
                : s.gain.kind == Scenario::Gain::Kind::RateShift ? "shift" : "explicit")
        << "\n";
    out << "gain.rho = " << format_double(s.gain.rho) << "\n";
    out << "gain.sigma_star = " << format_double(s.gain.sigma_star) << "\n";
    write_list(out, "gain.values", s.gain.values);
    if (s.gain.observable_only) out << "gain.observable_only = true\n";

    out << "estimator.kind = "
        << (s.estimator.kind == Scenario::Estimator::Kind::Identity
                ? "identity"
                : s.estimator.kind == Scenario::Estimator::Kind::General ? "general"
                                                                         : "regional")
        << "\n";
    write_list(out, "estimator.rates", s.estimator.rates);
    write_list(out, "estimator.injection", s.estimator.injection);

    out << "init.kind = "
        << (s.initial.kind == Scenario::Initial::Kind::Random
                ? "random"
                : s.initial.kind == Scenario::Initial::Kind::Explicit ? "explicit" : "mode")
        << "\n";
    out << "init.amplitude = " << format_double(s.initial.amplitude) << "\n";
    write_list(out, "init.values", s.initial.values);
    if (s.initial.kind == Scenario::Initial::Kind::SingleMode) {
        out << "init.mode.i = " << s.initial.mode_x << "\n";
        out << "init.mode.j = " << s.initial.mode_y << "\n";
        out << "init.mode.value = " << format_double(s.initial.mode_value) << "\n";
    }
    out << "init.w0 = "
        << (s.observer_init.kind == Scenario::ObserverInit::Kind::Zero
                ? "zero"
                : s.observer_init.kind == Scenario::ObserverInit::Kind::Match ? "match"
                                                                              : "explicit")
        << "\n";
    write_list(out, "init.w0_values", s.observer_init.values);

    if (s.input.channels > 0) {
        out << "input.channels = " << s.input.channels << "\n";
        write_list(out, "input.times", s.input.times);
        write_list(out, "input.values", s.input.values);
        write_list(out, "input.actuator", s.input.actuator);
    }

    out << "time.t_final = " << format_double(s.time.t_final) << "\n";
    out << "time.dt = " << format_double(s.time.dt) << "\n";
    out << "seed = " << s.seed << "\n";
    out << "scan.resolution = " << s.scan_resolution << "\n";
    out << "scan.horizon = " << format_double(s.scan_horizon) << "\n";
    if (s.norm_stride > 0) out << "output.norm_stride = " << s.norm_stride << "\n";
    out << "fit.tail_fraction = " << format_double(s.tail_fraction) << "\n";
    if (s.sigma_ref > 0.0) out << "verdict.sigma_ref = " << format_double(s.sigma_ref) << "\n";
    return out.str();
}

Eigen::VectorXd initial_coefficients(const Scenario& s, const spectral::ModeSet& modes) {
    const auto n = static_cast<Eigen::Index>(modes.size());
    Eigen::VectorXd z0 = Eigen::VectorXd::Zero(n);
    switch (s.initial.kind) {
        case Scenario::Initial::Kind::Explicit: {
            if (s.initial.values.size() > modes.size())
                throw ConfigError("field `init.values`: more entries than modes");
            for (std::size_t k = 0; k < s.initial.values.size(); ++k)
                z0(static_cast<Eigen::Index>(k)) = s.initial.values[k];
            break;
        }
        case Scenario::Initial::Kind::SingleMode: {
            bool found = false;
            for (std::size_t k = 0; k < modes.size(); ++k) {
                if (modes.mode(k).x_order == s.initial.mode_x &&
                    modes.mode(k).y_order == s.initial.mode_y) {
                    z0(static_cast<Eigen::Index>(k)) = s.initial.mode_value;
                    found = true;
                    break;
                }
            }
            if (!found)
                throw ConfigError("field `init.mode`: mode outside the truncation");
            break;
        }
        case Scenario::Initial::Kind::Random: {
            std::mt19937_64 rng(s.seed);
            for (Eigen::Index k = 0; k < n; ++k) {
                // Uniform in [-1, 1] from the top 53 bits, identical across platforms.
                const double u =
                    static_cast<double>(rng() >> 11) / 9007199254740992.0;
                z0(k) = s.initial.amplitude * (2.0 * u - 1.0);
            }
            break;
        }
    }
    return z0;
}

} // namespace regobs::cli
