#include "dfrelay/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "dfrelay/errors.hpp"
#include "dfrelay/schemes.hpp"

namespace dfrelay::cli {

using nlohmann::json;

namespace {

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double number_at(const json& j, const char* key, const std::string& path) {
    const json* v = find(j, key);
    const std::string field = path + "." + key;
    if (!v) throw ConfigError(field, "missing");
    if (!v->is_number()) throw ConfigError(field, "must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
    return x;
}

std::optional<double> optional_number(const json& j, const char* key, const std::string& path) {
    if (!find(j, key)) return std::nullopt;
    return number_at(j, key, path);
}

int integer_at(const json& j, const char* key, const std::string& path) {
    const json* v = find(j, key);
    const std::string field = path + "." + key;
    if (!v) throw ConfigError(field, "missing");
    if (!v->is_number_integer()) throw ConfigError(field, "must be an integer");
    return v->get<int>();
}

std::string string_at(const json& j, const char* key, const std::string& path) {
    const json* v = find(j, key);
    const std::string field = path + "." + key;
    if (!v) throw ConfigError(field, "missing");
    if (!v->is_string()) throw ConfigError(field, "must be a string");
    return v->get<std::string>();
}

Scheme scheme_at(const json& v, const std::string& field) {
    if (!v.is_string()) throw ConfigError(field, "must be a string");
    try {
        return channel::scheme_from_string(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
}

void require_positive(double x, const std::string& field) {
    if (!(x > 0.0)) throw ConfigError(field, "must be positive");
}

void check_relay_count(int L, const std::string& field) {
    if (L < 0 || L > kMaxRelays) throw ConfigError(field, "must be in 0.." + std::to_string(kMaxRelays));
}

bool is_indicator(Metric m) { return m == Metric::OP || m == Metric::DirectOP || m == Metric::DecodeProb; }

}  // namespace

// ---------------------------------------------------------------------------

ScenarioConfig ScenarioConfig::resolved() const {
    ScenarioConfig out = *this;
    if (!profile) return out;
    const auto& p = *profile;
    out.direct_m = p.m0.value_or(p.m);
    out.direct_snr_db = p.gamma0_db;
    out.relays.clear();
    const double base = p.gammab_db.value_or(p.gamma0_db);
    const double step_db = p.delta * 10.0 / std::numbers::ln10;
    for (int k = 1; k <= relay_count; ++k) {
        const double db = base - k * step_db;
        out.relays.push_back({p.m, p.m, db, db});
    }
    out.profile.reset();
    return out;
}

NetworkScenario ScenarioConfig::build() const {
    const ScenarioConfig r = resolved();
    if (static_cast<int>(r.relays.size()) != r.relay_count) {
        throw ConfigError("scenario.relays", "expected " + std::to_string(r.relay_count) + " entries");
    }
    NetworkScenario s;
    s.scheme = r.scheme;
    s.rate = r.rate;
    s.direct = channel::LinkSpec(r.direct_m, channel::db_to_linear(r.direct_snr_db));
    for (const auto& relay : r.relays) {
        s.first_hop.emplace_back(relay.m_first, channel::db_to_linear(relay.snr_first_db));
        s.second_hop.emplace_back(relay.m_second, channel::db_to_linear(relay.snr_second_db));
    }
    s.validate();
    return s;
}

std::string to_string(Metric metric) {
    switch (metric) {
        case Metric::OP: return "OP";
        case Metric::ASEP: return "ASEP";
        case Metric::ABEP: return "ABEP";
        case Metric::DecodeProb: return "DECODE_PROB";
        case Metric::DirectOP: return "DIRECT_OP";
    }
    return "unknown";
}

Metric metric_from_string(const std::string& name) {
    for (Metric m : {Metric::OP, Metric::ASEP, Metric::ABEP, Metric::DecodeProb, Metric::DirectOP}) {
        if (to_string(m) == name) return m;
    }
    throw std::invalid_argument("unknown metric '" + name + "'");
}

std::string to_string(Axis axis) {
    switch (axis) {
        case Axis::None: return "none";
        case Axis::L: return "L";
        case Axis::Gamma0Db: return "gamma0_db";
        case Axis::GammabDb: return "gammab_db";
        case Axis::M: return "m";
        case Axis::Delta: return "delta";
    }
    return "unknown";
}

Axis axis_from_string(const std::string& name) {
    for (Axis a : {Axis::None, Axis::L, Axis::Gamma0Db, Axis::GammabDb, Axis::M, Axis::Delta}) {
        if (to_string(a) == name) return a;
    }
    throw std::invalid_argument("unknown axis '" + name + "'");
}

// ---------------------------------------------------------------------------
// Parsing

ScenarioConfig parse_scenario(const json& j) {
    if (!j.is_object()) throw ConfigError("scenario", "must be an object");
    ScenarioConfig c;
    if (!find(j, "scheme")) throw ConfigError("scenario.scheme", "missing");
    c.scheme = scheme_at(j["scheme"], "scenario.scheme");
    c.rate = number_at(j, "rate_bpshz", "scenario");
    require_positive(c.rate, "scenario.rate_bpshz");

    const json* relays = find(j, "relays");
    const json* profile = find(j, "profile");
    if (relays && profile) throw ConfigError("scenario", "give either relays or profile, not both");

    if (profile) {
        if (!profile->is_object()) throw ConfigError("scenario.profile", "must be an object");
        ProfileConfig p;
        p.gamma0_db = number_at(*profile, "gamma0_db", "scenario.profile");
        p.gammab_db = optional_number(*profile, "gammab_db", "scenario.profile");
        p.delta = number_at(*profile, "delta", "scenario.profile");
        p.m = number_at(*profile, "m", "scenario.profile");
        p.m0 = optional_number(*profile, "m0", "scenario.profile");
        if (p.delta < 0) throw ConfigError("scenario.profile.delta", "must be >= 0");
        require_positive(p.m, "scenario.profile.m");
        if (p.m0) require_positive(*p.m0, "scenario.profile.m0");
        if (find(j, "direct")) throw ConfigError("scenario.direct", "the profile defines the direct link");
        c.relay_count = integer_at(j, "L", "scenario");
        check_relay_count(c.relay_count, "scenario.L");
        c.profile = p;
        return c;
    }

    const json* direct = find(j, "direct");
    if (!direct) throw ConfigError("scenario.direct", "missing");
    if (!direct->is_object()) throw ConfigError("scenario.direct", "must be an object");
    c.direct_m = number_at(*direct, "m", "scenario.direct");
    c.direct_snr_db = number_at(*direct, "snr_db", "scenario.direct");
    require_positive(c.direct_m, "scenario.direct.m");

    if (relays) {
        if (!relays->is_array()) throw ConfigError("scenario.relays", "must be an array");
        for (std::size_t k = 0; k < relays->size(); ++k) {
            const json& r = (*relays)[k];
            const std::string path = "scenario.relays[" + std::to_string(k) + "]";
            if (!r.is_object()) throw ConfigError(path, "must be an object");
            RelayConfig rc{number_at(r, "m_first", path), number_at(r, "m_second", path),
                           number_at(r, "snr_first_db", path), number_at(r, "snr_second_db", path)};
            require_positive(rc.m_first, path + ".m_first");
            require_positive(rc.m_second, path + ".m_second");
            c.relays.push_back(rc);
        }
    }
    c.relay_count = static_cast<int>(c.relays.size());
    if (find(j, "L") && integer_at(j, "L", "scenario") != c.relay_count) {
        throw ConfigError("scenario.L", "does not match the number of relays");
    }
    check_relay_count(c.relay_count, "scenario.relays");
    return c;
}

std::vector<MetricRequest> parse_metrics(const json& j) {
    if (!j.is_array()) throw ConfigError("metrics", "must be an array");
    if (j.empty()) throw ConfigError("metrics", "must not be empty");
    std::vector<MetricRequest> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string path = "metrics[" + std::to_string(i) + "]";
        const json& m = j[i];
        if (!m.is_object()) throw ConfigError(path, "must be an object");
        MetricRequest req;
        try {
            req.metric = metric_from_string(string_at(m, "metric", path));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path + ".metric", e.what());
        }
        if (req.metric == Metric::ASEP || req.metric == Metric::ABEP) {
            const std::string family = string_at(m, "modulation", path);
            const int order = find(m, "order") ? integer_at(m, "order", path) : 2;
            try {
                req.modulation = metrics::modulation_from_string(family, order);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(path + ".modulation", e.what());
            }
        } else if (find(m, "modulation")) {
            throw ConfigError(path + ".modulation", "only ASEP and ABEP take a modulation");
        }
        out.push_back(req);
    }
    return out;
}

namespace {

std::optional<McSettings> parse_mc(const json& j) {
    const json* mc = find(j, "mc");
    if (!mc) return std::nullopt;
    if (!mc->is_object()) throw ConfigError("mc", "must be an object");
    McSettings s;
    const json* trials = find(*mc, "trials");
    if (!trials || !trials->is_number_integer()) throw ConfigError("mc.trials", "must be an integer");
    s.trials = trials->get<std::int64_t>();
    if (s.trials < montecarlo::kMinTrials) throw ConfigError("mc.trials", "must be at least 10000");
    const json* seed = find(*mc, "seed");
    if (!seed || !seed->is_number_integer()) throw ConfigError("mc.seed", "must be an integer");
    s.seed = seed->get<std::uint64_t>();
    return s;
}

}  // namespace

SweepSpec parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
    SweepSpec spec;
    const json* scenario = find(j, "scenario");
    if (!scenario) throw ConfigError("scenario", "missing");
    spec.base = parse_scenario(*scenario);
    if (const json* n = find(j, "name")) {
        if (!n->is_string()) throw ConfigError("name", "must be a string");
        spec.name = n->get<std::string>();
    }
    if (const json* schemes = find(j, "schemes")) {
        if (!schemes->is_array() || schemes->empty()) throw ConfigError("schemes", "must be a non-empty array");
        for (std::size_t i = 0; i < schemes->size(); ++i) {
            spec.schemes.push_back(scheme_at((*schemes)[i], "schemes[" + std::to_string(i) + "]"));
        }
    }
    const json* metrics_block = find(j, "metrics");
    spec.metrics = metrics_block ? parse_metrics(*metrics_block) : std::vector<MetricRequest>{{Metric::OP, {}}};
    spec.mc = parse_mc(j);
    spec.validate();
    return spec;
}

SweepSpec parse_sweep(const json& j) {
    SweepSpec spec = parse_config(j);
    const json* axis = find(j, "axis");
    if (!axis || !axis->is_string()) throw ConfigError("axis", "must be a string");
    try {
        spec.axis = axis_from_string(axis->get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("axis", e.what());
    }
    if (spec.axis == Axis::None) throw ConfigError("axis", "a sweep needs an axis");
    const json* values = find(j, "values");
    if (!values || !values->is_array()) throw ConfigError("values", "must be an array");
    for (std::size_t i = 0; i < values->size(); ++i) {
        const json& v = (*values)[i];
        if (!v.is_number()) throw ConfigError("values[" + std::to_string(i) + "]", "must be a number");
        spec.values.push_back(v.get<double>());
    }
    spec.validate();
    return spec;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path, std::string("invalid JSON: ") + e.what());
    }
}

void SweepSpec::validate() const {
    if (name.find_first_of(",\n\"") != std::string::npos) throw ConfigError("name", "must not contain commas or quotes");
    if (metrics.empty()) throw ConfigError("metrics", "must not be empty");
    for (const auto& m : metrics) {
        if (m.metric == Metric::DecodeProb && base.relay_count == 0 && axis != Axis::L) {
            throw ConfigError("metrics", "DECODE_PROB needs at least one relay");
        }
    }
    if (axis == Axis::None) return;
    if (values.empty()) throw ConfigError("values", "axis '" + to_string(axis) + "' has no values");
    if (!base.profile && axis != Axis::Gamma0Db) {
        throw ConfigError("scenario.profile", "sweeping '" + to_string(axis) + "' needs a profile scenario");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        const std::string field = "values[" + std::to_string(i) + "]";
        if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
        switch (axis) {
            case Axis::L:
                if (v != std::floor(v)) throw ConfigError(field, "L must be an integer");
                check_relay_count(static_cast<int>(v), field);
                break;
            case Axis::M: require_positive(v, field); break;
            case Axis::Delta:
                if (v < 0) throw ConfigError(field, "delta must be >= 0");
                break;
            default: break;
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation

AnalyticValue evaluate_analytic(const NetworkScenario& scenario, const MetricRequest& request) {
    using metrics::to_string;
    const bool selective = scenario.scheme == Scheme::RateSelectiveRS;
    switch (request.metric) {
        case Metric::DirectOP: return {metrics::direct_outage(scenario), to_string(metrics::Method::ClosedForm)};
        case Metric::DecodeProb: {
            if (scenario.relay_count() == 0) throw ContractError("DECODE_PROB needs at least one relay");
            const int alpha = schemes::slot_factor(scenario.scheme, scenario.relay_count());
            return {channel::decode_success_prob(scenario.first_hop[0], scenario.rate, alpha),
                    to_string(metrics::Method::ClosedForm)};
        }
        case Metric::OP: {
            const auto r = selective ? metrics::outage_rate_selective_exact(schemes::build_rate_selective(scenario), scenario)
                                     : metrics::outage(schemes::build_stats(scenario), scenario);
            return {r.value, to_string(r.method)};
        }
        case Metric::ASEP:
        case Metric::ABEP: {
            if (!request.modulation) throw ContractError("error-probability metrics need a modulation");
            const auto& mod = *request.modulation;
            const bool bit = request.metric == Metric::ABEP;
            metrics::PerformanceResult r;
            if (selective) {
                const auto rs = schemes::build_rate_selective(scenario);
                r = bit ? metrics::abep_rate_selective(rs, mod) : metrics::asep_rate_selective(rs, mod);
            } else {
                const auto st = schemes::build_stats(scenario);
                r = bit ? metrics::abep(st, mod) : metrics::asep(st, mod);
            }
            return {r.value, to_string(r.method)};
        }
    }
    throw ContractError("unknown metric");
}

namespace {

ScenarioConfig apply_axis(ScenarioConfig c, Axis axis, double v) {
    switch (axis) {
        case Axis::None: break;
        case Axis::L: c.relay_count = static_cast<int>(v); break;
        case Axis::Gamma0Db:
            if (c.profile) {
                c.profile->gamma0_db = v;
            } else {
                c.direct_snr_db = v;
            }
            break;
        case Axis::GammabDb: c.profile->gammab_db = v; break;
        case Axis::M: c.profile->m = v; break;
        case Axis::Delta: c.profile->delta = v; break;
    }
    return c;
}

}  // namespace

std::vector<ResultRow> run_sweep(const SweepSpec& spec, const AnalyticFn& analytic) {
    spec.validate();
    const std::vector<double> values = spec.axis == Axis::None ? std::vector<double>{0.0} : spec.values;
    const std::vector<Scheme> schemes = spec.schemes.empty() ? std::vector<Scheme>{spec.base.scheme} : spec.schemes;

    std::vector<ModulationSpec> modulations;
    std::vector<int> mod_index;
    for (const auto& m : spec.metrics) {
        mod_index.push_back(-1);
        if (!m.modulation) continue;
        auto it = std::find(modulations.begin(), modulations.end(), *m.modulation);
        mod_index.back() = static_cast<int>(it - modulations.begin());
        if (it == modulations.end()) modulations.push_back(*m.modulation);
    }

    std::vector<ResultRow> rows;
    for (double v : values) {
        for (std::size_t si = 0; si < schemes.size(); ++si) {
            ScenarioConfig cfg = apply_axis(spec.base, spec.axis, v);
            cfg.scheme = schemes[si];
            const ScenarioConfig resolved = cfg.resolved();
            const NetworkScenario scenario = resolved.build();

            std::optional<montecarlo::SimulationResult> mc;
            if (spec.mc) mc = montecarlo::simulate(scenario, {spec.mc->trials, spec.mc->seed, modulations});

            for (std::size_t mi = 0; mi < spec.metrics.size(); ++mi) {
                const auto& req = spec.metrics[mi];
                if (req.metric == Metric::DirectOP && si > 0) continue;
                ResultRow row;
                row.sweep = spec.name;
                row.scenario = resolved;
                row.axis = spec.axis;
                row.axis_value = v;
                row.metric = req;
                const auto a = analytic(scenario, req);
                row.analytic = a.value;
                row.method = a.method;
                if (mc) {
                    montecarlo::EstimateWithCI e;
                    switch (req.metric) {
                        case Metric::OP: e = mc->outage; break;
                        case Metric::DirectOP: e = mc->direct_outage; break;
                        case Metric::DecodeProb: e = mc->decoded.at(0); break;
                        case Metric::ASEP:
                        case Metric::ABEP: {
                            e = mc->asep[mod_index[mi]];
                            const int bits = req.modulation->bits_per_symbol();
                            if (req.metric == Metric::ABEP && bits > 1) {
                                e.mean /= bits;
                                e.stderr_ /= bits;
                            }
                            break;
                        }
                    }
                    row.mc_mean = e.mean;
                    row.mc_stderr = e.stderr_;
                    row.z_score = is_indicator(req.metric) ? montecarlo::binomial_z(e, row.analytic) : e.z_score(row.analytic);
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

ValidationReport validate(SweepSpec spec, const McSettings& mc, double z_limit, const AnalyticFn& analytic) {
    spec.mc = mc;
    ValidationReport report;
    report.rows = run_sweep(spec, analytic);
    for (const auto& row : report.rows) {
        const double z = std::abs(*row.z_score);
        report.max_abs_z = std::max(report.max_abs_z, z);
        if (!(z <= z_limit)) ++report.failures;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Figure presets

namespace {

std::vector<double> range(double first, double last, double step) {
    std::vector<double> v;
    for (double x = first; x <= last + 1e-9; x += step) v.push_back(x);
    return v;
}

const std::vector<Scheme> kAllSchemes = {Scheme::PureRS, Scheme::RateSelectiveRS, Scheme::RepetitiveMRD,
                                         Scheme::RepetitiveSD};
const std::vector<Scheme> kRsSchemes = {Scheme::PureRS, Scheme::RateSelectiveRS};

SweepSpec preset(std::string name, int L, ProfileConfig profile, std::vector<Scheme> schemes, Axis axis,
                 std::vector<double> values, std::vector<MetricRequest> metrics) {
    SweepSpec s;
    s.name = std::move(name);
    s.base.scheme = schemes.front();
    s.base.rate = 1.0;
    s.base.relay_count = L;
    s.base.profile = profile;
    s.schemes = std::move(schemes);
    s.axis = axis;
    s.values = std::move(values);
    s.metrics = std::move(metrics);
    return s;
}

std::string fmt_label(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

std::vector<std::string> figure_names() { return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"}; }

std::vector<SweepSpec> figure_preset(const std::string& name) {
    const MetricRequest op{Metric::OP, {}};
    const auto L_axis = range(1, 8, 1);
    std::vector<SweepSpec> out;
    if (name == "fig2") {
        for (double m : {1.0, 2.0, 3.0}) {
            out.push_back(preset("fig2:m=" + fmt_label(m), 1, {5.0, {}, 0.0, m, {}}, kAllSchemes, Axis::L, L_axis, {op}));
        }
    } else if (name == "fig3") {
        for (double g : {0.0, 5.0, 10.0}) {
            out.push_back(preset("fig3:gamma0_db=" + fmt_label(g), 1, {g, {}, 0.0, 1.0, {}}, kAllSchemes, Axis::L, L_axis,
                                 {op}));
        }
    } else if (name == "fig4") {
        for (double m : {1.0, 2.0, 3.0}) {
            out.push_back(preset("fig4:m=" + fmt_label(m), 1, {5.0, {}, 0.0, m, {}},
                                 {Scheme::RepetitiveMRD, Scheme::PureRS}, Axis::L, L_axis,
                                 {{Metric::DecodeProb, {}}}));
        }
    } else if (name == "fig5") {
        const std::vector<MetricRequest> ms = {op, {Metric::DirectOP, {}}};
        const auto g = range(0, 20, 2);
        out.push_back(preset("fig5:A", 2, {0.0, {}, 0.3, 1.0, 1.0}, kRsSchemes, Axis::Gamma0Db, g, ms));
        out.push_back(preset("fig5:B", 2, {0.0, {}, 0.3, 6.0, 1.0}, kRsSchemes, Axis::Gamma0Db, g, ms));
        out.push_back(preset("fig5:C", 2, {0.0, {}, 0.0, 3.0, 3.0}, kRsSchemes, Axis::Gamma0Db, g, ms));
    } else if (name == "fig6") {
        const MetricRequest qam{Metric::ABEP, ModulationSpec::mqam(4)};
        for (double m : {1.0, 2.0, 3.0}) {
            out.push_back(preset("fig6:m=" + fmt_label(m), 1, {0.0, 5.0, 0.0, m, {}}, kAllSchemes, Axis::L, L_axis, {qam}));
        }
    } else if (name == "fig7") {
        const MetricRequest dbpsk{Metric::ABEP, ModulationSpec::dbpsk()};
        for (double gb : {5.0, 10.0, 15.0}) {
            out.push_back(preset("fig7:gammab_db=" + fmt_label(gb), 1, {0.0, gb, 0.0, 1.0, {}}, kAllSchemes, Axis::L,
                                 L_axis, {dbpsk}));
        }
    } else if (name == "fig8") {
        const MetricRequest dbpsk{Metric::ABEP, ModulationSpec::dbpsk()};
        const auto g = range(0, 20, 2);
        out.push_back(preset("fig8:A", 1, {0.0, 0.0, 0.1, 1.0, 0.5}, kRsSchemes, Axis::GammabDb, g, {dbpsk}));
        out.push_back(preset("fig8:B", 2, {0.0, 0.0, 0.0, 2.0, 1.0}, kRsSchemes, Axis::GammabDb, g, {dbpsk}));
        out.push_back(preset("fig8:C", 3, {0.0, 0.0, 0.0, 3.0, 3.0}, kRsSchemes, Axis::GammabDb, g, {dbpsk}));
    } else {
        throw ConfigError("figure", "unknown preset '" + name + "'");
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, end);
}

namespace {

double parse_double(const std::string& s, const char* column) {
    double v = 0.0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
        throw ConfigError(std::string("csv.") + column, "cannot parse '" + s + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::vector<std::string> csv_header() {
    return {"sweep",  "scheme",   "L",         "rate_bpshz", "direct_m", "direct_snr_db", "relays",  "axis", "axis_value",
            "metric", "modulation", "order", "analytic", "method",   "mc_mean",       "mc_stderr", "z_score"};
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool header) {
    if (header) {
        const auto h = csv_header();
        for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
        out << '\n';
    }
    for (const auto& r : rows) {
        const auto& s = r.scenario;
        std::string relays;
        for (std::size_t k = 0; k < s.relays.size(); ++k) {
            const auto& rc = s.relays[k];
            if (k) relays += '|';
            relays += format_double(rc.m_first) + ":" + format_double(rc.m_second) + ":" + format_double(rc.snr_first_db) +
                      ":" + format_double(rc.snr_second_db);
        }
        const auto& mod = r.metric.modulation;
        out << r.sweep << ',' << channel::to_string(s.scheme) << ',' << s.relay_count << ',' << format_double(s.rate) << ','
            << format_double(s.direct_m) << ',' << format_double(s.direct_snr_db) << ',' << relays << ','
            << to_string(r.axis) << ',' << format_double(r.axis_value) << ',' << to_string(r.metric.metric) << ','
            << (mod ? mod->family_name() : "") << ',' << (mod ? std::to_string(mod->order) : "") << ','
            << format_double(r.analytic) << ',' << r.method << ',' << optional_cell(r.mc_mean) << ','
            << optional_cell(r.mc_stderr) << ',' << optional_cell(r.z_score) << '\n';
    }
}

std::vector<ResultRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("csv", "empty input");
    const auto header = csv_header();
    if (split(line, ',') != header) throw ConfigError("csv", "unexpected header");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != header.size()) throw ConfigError("csv", "row has " + std::to_string(f.size()) + " fields");
        ResultRow r;
        r.sweep = f[0];
        auto& s = r.scenario;
        s.scheme = channel::scheme_from_string(f[1]);
        s.relay_count = static_cast<int>(parse_double(f[2], "L"));
        s.rate = parse_double(f[3], "rate_bpshz");
        s.direct_m = parse_double(f[4], "direct_m");
        s.direct_snr_db = parse_double(f[5], "direct_snr_db");
        if (!f[6].empty()) {
            for (const auto& part : split(f[6], '|')) {
                const auto x = split(part, ':');
                if (x.size() != 4) throw ConfigError("csv.relays", "expected m_first:m_second:snr_first_db:snr_second_db");
                s.relays.push_back({parse_double(x[0], "relays"), parse_double(x[1], "relays"), parse_double(x[2], "relays"),
                                    parse_double(x[3], "relays")});
            }
        }
        r.axis = axis_from_string(f[7]);
        r.axis_value = parse_double(f[8], "axis_value");
        r.metric.metric = metric_from_string(f[9]);
        if (!f[10].empty()) r.metric.modulation = metrics::modulation_from_string(f[10], std::stoi(f[11]));
        r.analytic = parse_double(f[12], "analytic");
        r.method = f[13];
        if (!f[14].empty()) r.mc_mean = parse_double(f[14], "mc_mean");
        if (!f[15].empty()) r.mc_stderr = parse_double(f[15], "mc_stderr");
        if (!f[16].empty()) r.z_score = parse_double(f[16], "z_score");
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace dfrelay::cli
