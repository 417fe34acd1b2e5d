// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#include "psolas/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "psolas/errors.hpp"
#include "psolas/text_format.hpp"

namespace psolas {
namespace {

std::string_view trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Field
{
    std::string_view key;
    std::string_view value;
    std::size_t line;

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError(std::string(key), line, what);
    }

    double number() const
    {
        auto v = parse_double(value);
        if (!v || std::isnan(*v))
            fail(fmt::format("malformed number '{}'", value));
        return *v;
    }
    double probability() const
    {
        double v = number();
        if (!(v >= 0 && v <= 1))
            fail(fmt::format("probability {} outside [0, 1]", value));
        return v;
    }
    double duration() const
    {
        double v = number();
        if (!(v >= 0) || !std::isfinite(v))
            fail(fmt::format("duration {} must be finite and non-negative", value));
        return v;
    }
    template<class Int>
    Int integer(Int min_value) const
    {
        Int out{};
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty())
            fail(fmt::format("malformed integer '{}'", value));
        if (out < min_value)
            fail(fmt::format("value {} below minimum {}", value, min_value));
        return out;
    }
    bool boolean() const
    {
        if (value == "true" || value == "1" || value == "yes")
            return true;
        if (value == "false" || value == "0" || value == "no")
            return false;
        fail(fmt::format("expected true or false, got '{}'", value));
    }
    template<class T, class Parse>
    std::vector<T> list(Parse parse_one) const
    {
        std::vector<T> out;
        std::string_view rest = value;
        while (true)
        {
            auto comma = rest.find(',');
            Field item{key, trim(rest.substr(0, comma)), line};
            out.push_back(parse_one(item));
            if (comma == std::string_view::npos)
                break;
            rest = rest.substr(comma + 1);
        }
        return out;
    }
};

template<class T>
std::string join(const std::vector<T>& v, std::function<std::string(const T&)> fmt_one)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        if (i)
            out += ',';
        out += fmt_one(v[i]);
    }
    return out;
}

//---------------------------------------------------------------------------//
// Scenario keys
struct ScenarioKey
{
    std::string_view name;
    std::function<void(Scenario&, const Field&)> set;
    std::function<std::string(const Scenario&)> get;
};

#define PSOLAS_PROB_KEY(NAME, MEMBER)                                                        \
    ScenarioKey{NAME, [](Scenario& s, const Field& f) { s.MEMBER = f.probability(); },       \
                [](const Scenario& s) { return format_double(s.MEMBER); }}
#define PSOLAS_TIME_KEY(NAME, MEMBER)                                                        \
    ScenarioKey{NAME, [](Scenario& s, const Field& f) { s.timing.MEMBER = f.duration(); },   \
                [](const Scenario& s) { return format_double(s.timing.MEMBER); }}

const std::vector<ScenarioKey>& scenario_keys()
{
    static const std::vector<ScenarioKey> keys = {
        {"width", [](Scenario& s, const Field& f) { s.extent.x = f.integer<std::int64_t>(1); },
         [](const Scenario& s) { return std::to_string(s.extent.x); }},
        {"height", [](Scenario& s, const Field& f) { s.extent.y = f.integer<std::int64_t>(1); },
         [](const Scenario& s) { return std::to_string(s.extent.y); }},
        {"target_side", [](Scenario& s, const Field& f) { s.target_side = f.integer<std::int64_t>(1); },
         [](const Scenario& s) { return std::to_string(s.target_side); }},
        PSOLAS_PROB_KEY("alpha", alpha),
        PSOLAS_PROB_KEY("address_efficiency", errors.address_efficiency),
        PSOLAS_PROB_KEY("crosstalk_prob", errors.crosstalk_prob),
        PSOLAS_PROB_KEY("pump_fail_prob", errors.pump_fail_prob),
        PSOLAS_PROB_KEY("transport_spinflip_prob", errors.transport_spinflip_prob),
        PSOLAS_PROB_KEY("reconstruct_error_prob", errors.reconstruct_error_prob),
        {"background_lifetime",
         [](Scenario& s, const Field& f) {
             double v = f.number();
             if (!(v > 0))
                 f.fail("lifetime must be positive (inf disables loss)");
             s.errors.background_lifetime = v;
         },
         [](const Scenario& s) { return format_double(s.errors.background_lifetime); }},
        {"isolation_radius",
         [](Scenario& s, const Field& f) { s.errors.isolation_radius = f.integer<std::int64_t>(0); },
         [](const Scenario& s) { return std::to_string(s.errors.isolation_radius); }},
        {"min_separation",
         [](Scenario& s, const Field& f) { s.constraints.min_separation = f.integer<std::int64_t>(0); },
         [](const Scenario& s) { return std::to_string(s.constraints.min_separation); }},
        PSOLAS_TIME_KEY("t_image", t_image),
        PSOLAS_TIME_KEY("t_address_per_atom", t_address_per_atom),
        PSOLAS_TIME_KEY("t_address_parallel_overhead", t_address_parallel_overhead),
        PSOLAS_TIME_KEY("t_shift", t_shift),
        PSOLAS_TIME_KEY("t_pump", t_pump),
        PSOLAS_TIME_KEY("t_pushout", t_pushout),
        {"addressing_mode",
         [](Scenario& s, const Field& f) {
             if (f.value == "serial")
                 s.timing.addressing_mode = AddressingMode::Serial;
             else if (f.value == "parallel")
                 s.timing.addressing_mode = AddressingMode::Parallel;
             else
                 f.fail(fmt::format("expected serial or parallel, got '{}'", f.value));
         },
         [](const Scenario& s) { return std::string(to_string(s.timing.addressing_mode)); }},
        {"max_iterations",
         [](Scenario& s, const Field& f) { s.stop.max_iterations = f.integer<std::size_t>(0); },
         [](const Scenario& s) { return std::to_string(s.stop.max_iterations); }},
        {"max_time",
         [](Scenario& s, const Field& f) {
             double v = f.number();
             if (!(v >= 0))
                 f.fail("max_time must be non-negative");
             s.stop.max_time = v;
         },
         [](const Scenario& s) { return format_double(s.stop.max_time); }},
    };
    return keys;
}

#undef PSOLAS_PROB_KEY
#undef PSOLAS_TIME_KEY

const ScenarioKey* find_scenario_key(std::string_view name)
{
    for (const auto& k : scenario_keys())
        if (k.name == name)
            return &k;
    return nullptr;
}

//---------------------------------------------------------------------------//
// Run keys
struct RunKey
{
    std::string_view name;
    std::function<void(RunConfig&, const Field&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<RunKey>& run_keys()
{
    static const std::vector<RunKey> keys = {
        {"mode",
         [](RunConfig& c, const Field& f) {
             static const std::set<std::string_view> modes{"sort", "fig1", "ensemble", "sweep", "ramp"};
             if (!modes.count(f.value))
                 f.fail(fmt::format("unknown mode '{}'", f.value));
             c.mode = std::string(f.value);
         },
         [](const RunConfig& c) { return c.mode; }},
        {"scenario",
         [](RunConfig& c, const Field& f) {
             if (f.value != "A" && f.value != "B" && f.value != "custom")
                 f.fail(fmt::format("unknown scenario '{}' (expected A, B or custom)", f.value));
             c.scenario_name = std::string(f.value);
         },
         [](const RunConfig& c) { return c.scenario_name; }},
        {"error_free", [](RunConfig& c, const Field& f) { c.error_free = f.boolean(); },
         [](const RunConfig& c) { return std::string(c.error_free ? "true" : "false"); }},
        {"out",
         [](RunConfig& c, const Field& f) {
             if (f.value.empty())
                 f.fail("output directory must not be empty");
             c.out_dir = std::string(f.value);
         },
         [](const RunConfig& c) { return c.out_dir; }},
        {"seed", [](RunConfig& c, const Field& f) { c.seed = f.integer<std::uint64_t>(0); },
         [](const RunConfig& c) { return std::to_string(c.seed); }},
        {"trials", [](RunConfig& c, const Field& f) { c.trials = f.integer<std::size_t>(1); },
         [](const RunConfig& c) { return std::to_string(c.trials); }},
        {"threads", [](RunConfig& c, const Field& f) { c.threads = f.integer<std::size_t>(0); },
         [](const RunConfig& c) { return std::to_string(c.threads); }},
        {"export_log", [](RunConfig& c, const Field& f) { c.export_log = f.boolean(); },
         [](const RunConfig& c) { return std::string(c.export_log ? "true" : "false"); }},
        {"export_snapshots", [](RunConfig& c, const Field& f) { c.export_snapshots = f.boolean(); },
         [](const RunConfig& c) { return std::string(c.export_snapshots ? "true" : "false"); }},
        {"export_plan", [](RunConfig& c, const Field& f) { c.export_plan = f.boolean(); },
         [](const RunConfig& c) { return std::string(c.export_plan ? "true" : "false"); }},
        {"fig1_width", [](RunConfig& c, const Field& f) { c.fig1_width = f.integer<std::int64_t>(8); },
         [](const RunConfig& c) { return std::to_string(c.fig1_width); }},
        {"fig1_max_passes", [](RunConfig& c, const Field& f) { c.fig1_max_passes = f.integer<std::size_t>(1); },
         [](const RunConfig& c) { return std::to_string(c.fig1_max_passes); }},
        {"fig1_separations",
         [](RunConfig& c, const Field& f) {
             c.fig1_separations = f.list<std::int64_t>([](const Field& i) { return i.integer<std::int64_t>(1); });
         },
         [](const RunConfig& c) {
             return join<std::int64_t>(c.fig1_separations, [](const std::int64_t& v) { return std::to_string(v); });
         }},
        {"sweep_alphas",
         [](RunConfig& c, const Field& f) {
             c.sweep_alphas = f.list<double>([](const Field& i) {
                 double v = i.probability();
                 if (v <= 0 || v >= 1)
                     i.fail("sweep alpha must be strictly between 0 and 1");
                 return v;
             });
         },
         [](const RunConfig& c) {
             return join<double>(c.sweep_alphas, [](const double& v) { return format_double(v); });
         }},
        {"sweep_sizes",
         [](RunConfig& c, const Field& f) {
             c.sweep_sizes = f.list<std::size_t>([](const Field& i) { return i.integer<std::size_t>(1); });
         },
         [](const RunConfig& c) {
             return join<std::size_t>(c.sweep_sizes, [](const std::size_t& v) { return std::to_string(v); });
         }},
        {"ramp_displacement", [](RunConfig& c, const Field& f) { c.ramp_displacement = f.number(); },
         [](const RunConfig& c) { return format_double(c.ramp_displacement); }},
        {"ramp_duration",
         [](RunConfig& c, const Field& f) {
             double v = f.duration();
             if (v <= 0)
                 f.fail("ramp duration must be positive");
             c.ramp_duration = v;
         },
         [](const RunConfig& c) { return format_double(c.ramp_duration); }},
        {"ramp_samples", [](RunConfig& c, const Field& f) { c.ramp_samples = f.integer<std::size_t>(2); },
         [](const RunConfig& c) { return std::to_string(c.ramp_samples); }},
    };
    return keys;
}

const RunKey* find_run_key(std::string_view name)
{
    for (const auto& k : run_keys())
        if (k.name == name)
            return &k;
    return nullptr;
}

Scenario preset(const std::string& name)
{
    if (name == "A")
        return Scenario::preset_a();
    if (name == "B")
        return Scenario::preset_b();
    Scenario s;
    s.name = "custom";
    return s;
}

} // namespace

void RunConfig::resolve()
{
    Scenario s = preset(scenario_name);
    for (const auto& o : overrides)
    {
        const auto* k = find_scenario_key(o.key);
        if (!k)
            throw ConfigError(o.key, o.line, "unknown key");
        k->set(s, Field{o.key, o.value, o.line});
    }
    if (error_free)
        s = s.error_free();
    try
    {
        s.validate();
    }
    catch (const Error& e)
    {
        std::string key = "target_side";
        std::size_t line = 0;
        for (const auto& o : overrides)
            if (o.key == "target_side" || o.key == "width" || o.key == "height")
            {
                key = o.key;
                line = o.line;
            }
        throw ConfigError(key, line, e.what());
    }
    scenario = std::move(s);
}

std::string RunConfig::to_text() const
{
    std::ostringstream os;
    os << "# psolas run configuration (effective values)\n";
    for (const auto& k : run_keys())
        os << k.name << " = " << k.get(*this) << '\n';
    for (const auto& k : scenario_keys())
        os << k.name << " = " << k.get(scenario) << '\n';
    return os.str();
}

bool operator==(const RunConfig& a, const RunConfig& b)
{
    auto run_equal = std::all_of(run_keys().begin(), run_keys().end(),
                                 [&](const RunKey& k) { return k.get(a) == k.get(b); });
    return run_equal && a.scenario == b.scenario;
}

RunConfig parse_config(std::string_view text)
{
    RunConfig config;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty())
    {
        ++line_no;
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(line), line_no, "expected 'key = value'");
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("", line_no, "missing key");
        if (!seen.insert(std::string(key)).second)
            throw ConfigError(std::string(key), line_no, "key given more than once");

        Field field{key, value, line_no};
        if (const auto* rk = find_run_key(key))
        {
            rk->set(config, field);
        }
        else if (const auto* sk = find_scenario_key(key))
        {
            // Range-check now so the error names this line.
            Scenario scratch;
            sk->set(scratch, field);
            config.overrides.push_back({std::string(key), std::string(value), line_no});
        }
        else
        {
            throw ConfigError(std::string(key), line_no, "unknown key");
        }
    }
    config.resolve();
    return config;
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> out;
    for (const auto& k : run_keys())
        out.emplace_back(k.name);
    for (const auto& k : scenario_keys())
        out.emplace_back(k.name);
    return out;
}

} // namespace psolas
