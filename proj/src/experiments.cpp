#include "ftasep/experiments.hpp"

#include "ftasep/dynamics.hpp"
#include "ftasep/estimators.hpp"
#include "ftasep/freezing.hpp"
#include "ftasep/limits.hpp"
#include "ftasep/measures.hpp"
#include "ftasep/parallel.hpp"
#include "ftasep/ring_exact.hpp"
#include "ftasep/rng.hpp"
#include "ftasep/text.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace ftasep
{
    namespace
    {
        using json = nlohmann::ordered_json;

        constexpr std::string_view kVersion = "1.0.0";

        constexpr std::pair<ExperimentKind, std::string_view> kKinds[] = {
            {ExperimentKind::Simulate, "simulate"},
            {ExperimentKind::RingExact, "ring-exact"},
            {ExperimentKind::InvarianceCheck, "invariance-check"},
            {ExperimentKind::LimitTable, "limit-table"},
            {ExperimentKind::CriticalAbsorption, "critical-absorption"},
            {ExperimentKind::FreezingScan, "freezing-scan"},
            {ExperimentKind::SubcriticalCompare, "subcritical-compare"},
        };

        // Locates keys in the source text for diagnostics.
        class SourceMap
        {
        public:
            explicit SourceMap(std::string_view text) : text_(text) {}

            std::size_t line_of_offset(std::size_t offset) const
            {
                offset = std::min(offset, text_.size());
                return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
            }

            // Line of "key", searched after "parent" when a parent is given.
            std::size_t line_of(std::string_view parent, std::string_view key) const
            {
                std::size_t from = 0;
                if (!parent.empty())
                {
                    const auto p = text_.find('"' + std::string(parent) + '"');
                    if (p != std::string_view::npos)
                        from = p + parent.size() + 2;
                }
                const auto k = text_.find('"' + std::string(key) + '"', from);
                return k == std::string_view::npos ? 0 : line_of_offset(k);
            }

        private:
            std::string_view text_;
        };

        class Reader
        {
        public:
            Reader(const json& obj, std::string parent, const SourceMap& map)
                : obj_(obj), parent_(std::move(parent)), map_(map)
            {
                if (!obj_.is_object())
                    fail(parent_.empty() ? "configuration must be a JSON object" : "'" + parent_ + "' must be an object", "");
            }

            void allow(std::initializer_list<std::string_view> keys) const
            {
                for (const auto& [k, v] : obj_.items())
                    if (std::find(keys.begin(), keys.end(), k) == keys.end())
                        fail("unknown key '" + k + "'" + where(), k);
            }

            bool has(std::string_view key) const { return obj_.contains(std::string(key)); }
            const json& raw(std::string_view key) const { return obj_.at(std::string(key)); }

            std::uint64_t uint(std::string_view key) const
            {
                const json& v = raw(key);
                if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                    fail("'" + std::string(key) + "' must be a non-negative integer", key);
                return v.get<std::uint64_t>();
            }

            std::int64_t integer(std::string_view key) const
            {
                const json& v = raw(key);
                if (!v.is_number_integer())
                    fail("'" + std::string(key) + "' must be an integer", key);
                return v.get<std::int64_t>();
            }

            double number(std::string_view key) const
            {
                const json& v = raw(key);
                if (!v.is_number())
                    fail("'" + std::string(key) + "' must be a number", key);
                return v.get<double>();
            }

            std::string string(std::string_view key) const
            {
                const json& v = raw(key);
                if (!v.is_string())
                    fail("'" + std::string(key) + "' must be a string", key);
                return v.get<std::string>();
            }

            bool boolean(std::string_view key) const
            {
                const json& v = raw(key);
                if (!v.is_boolean())
                    fail("'" + std::string(key) + "' must be true or false", key);
                return v.get<bool>();
            }

            std::vector<double> numbers(std::string_view key) const
            {
                const json& v = raw(key);
                std::vector<double> out;
                if (!v.is_array())
                    fail("'" + std::string(key) + "' must be an array of numbers", key);
                for (const auto& e : v)
                {
                    if (!e.is_number())
                        fail("'" + std::string(key) + "' must be an array of numbers", key);
                    out.push_back(e.get<double>());
                }
                return out;
            }

            [[noreturn]] void fail(const std::string& message, std::string_view key) const
            {
                throw ConfigError(message, key.empty() ? map_.line_of("", parent_) : map_.line_of(parent_, key));
            }

        private:
            std::string where() const { return parent_.empty() ? "" : " in '" + parent_ + "'"; }

            const json& obj_;
            std::string parent_;
            const SourceMap& map_;
        };

        json config_json(const ExperimentConfig& c)
        {
            json j;
            j["experiment"] = std::string(to_string(c.experiment));
            json lat;
            lat["topology"] = c.lattice.topology == TopologyKind::Ring ? "ring" : "segment";
            lat["L"] = c.lattice.length;
            if (c.lattice.particles)
                lat["k"] = *c.lattice.particles;
            if (c.lattice.rho)
                lat["rho"] = *c.lattice.rho;
            j["lattice"] = lat;
            json dyn;
            if (std::isfinite(c.dynamics.t_max))
                dyn["t_max"] = c.dynamics.t_max;
            if (c.dynamics.max_events != std::numeric_limits<std::uint64_t>::max())
                dyn["max_events"] = c.dynamics.max_events;
            dyn["snapshot_stride"] = c.dynamics.snapshot_stride;
            dyn["sample_dt"] = c.dynamics.sample_dt;
            dyn["sample_stride"] = c.dynamics.sample_stride;
            j["dynamics"] = dyn;
            j["trials"] = c.trials;
            j["seed"] = c.seed;
            j["output"] = {{"dir", c.output.dir}, {"trajectories", c.output.trajectories}};
            const auto& a = c.analysis;
            j["analysis"] = {{"n_max", a.n_max},
                             {"pattern_max", a.pattern_max},
                             {"width_max", a.width_max},
                             {"rhos", a.rhos},
                             {"horizon", a.horizon},
                             {"initial_half_width", a.initial_half_width},
                             {"max_half_width", a.max_half_width},
                             {"buffer_fraction", a.buffer_fraction},
                             {"mode", a.mode},
                             {"checkpoints", a.checkpoints}};
            return j;
        }

        std::string dump(const json& j) { return j.dump(2) + '\n'; }

        double lattice_rho(const ExperimentConfig& c)
        {
            if (!c.lattice.rho)
                throw ConfigError("this experiment needs lattice.rho", 0);
            return *c.lattice.rho;
        }

        // Thrown when a computed quantity fails its numerical check.
        struct NumericalFailure : std::runtime_error
        {
            using std::runtime_error::runtime_error;
        };

        std::vector<std::uint64_t> stream_ids(const RngStream& root, std::size_t trials)
        {
            std::vector<std::uint64_t> ids;
            for (std::size_t i = 0; i < trials; ++i)
                ids.push_back(root.substream(i).stream_id());
            return ids;
        }

        void run_simulate(const ExperimentConfig& c, std::size_t workers, ExperimentOutput& out)
        {
            const RngStream root(c.seed, 0);
            const Topology topo{c.lattice.topology, c.lattice.length};
            SamplingPlan plan;
            plan.dt = c.dynamics.sample_dt;
            plan.event_stride = c.dynamics.sample_dt > 0.0 ? 0 : std::max<std::uint64_t>(1, c.dynamics.sample_stride);
            plan.snapshot_stride = c.dynamics.snapshot_stride;
            const StopCondition stop{c.dynamics.t_max, c.dynamics.max_events};

            auto records = run_trials(c.trials, workers, [&](std::size_t i) {
                const RngStream stream = root.substream(i);
                RngStream init = stream.substream(0);
                RngStream dyn = stream.substream(1);
                Configuration start = c.lattice.particles
                                          ? uniform_sector_sample(c.lattice.length, *c.lattice.particles, init)
                                          : bernoulli_sample(*c.lattice.rho, topo, init);
                SimState state(std::move(start));
                return run_until(state, stop, dyn, plan);
            });

            std::string absorption = "trial,absorbed,absorption_time,final_time,events,final_state\n";
            for (std::size_t i = 0; i < records.size(); ++i)
            {
                const auto& r = records[i];
                if (c.output.trajectories)
                {
                    out.files["trajectory_" + std::to_string(i) + ".csv"] = r.to_csv();
                    if (c.dynamics.snapshot_stride > 0)
                        out.files["snapshots_" + std::to_string(i) + ".txt"] = r.snapshots_text();
                }
                absorption += std::to_string(i) + ',' + (r.absorbed ? "1" : "0") + ',' +
                              (r.absorbed ? fmt_double(r.absorption_time) : std::string("")) + ',' +
                              fmt_double(r.final_time) + ',' + std::to_string(r.events) + ',' +
                              r.final_config.to_string() + '\n';
            }
            out.files["absorption.csv"] = absorption;
            out.stream_ids = stream_ids(root, c.trials);
        }

        void run_ring_exact(const ExperimentConfig& c, ExperimentOutput& out)
        {
            const std::size_t length = c.lattice.length;
            const std::size_t k = *c.lattice.particles;
            const RingGeneratorMatrix gen = ring_generator_build(length, k);
            const RingAnalysis analysis = stationary_and_classes(gen);

            out.files["stationary.csv"] = stationary_csv(gen, analysis);
            std::string absorption = "class,representative,probability\n";
            json classes = json::array();
            double max_tv = 0.0;
            for (std::size_t ci = 0; ci < analysis.recurrent.size(); ++ci)
            {
                const auto& rc = analysis.recurrent[ci];
                absorption += std::to_string(ci) + ',' + gen.state(rc.states.front()).to_string() + ',' +
                              fmt_double(analysis.absorption[ci]) + '\n';
                const double tv = tv_from_uniform(rc);
                max_tv = std::max(max_tv, tv);
                bool frozen_class = rc.states.size() == 1 && is_frozen(gen.state(rc.states.front()));
                classes.push_back({{"size", rc.states.size()},
                                   {"tv_from_uniform", tv},
                                   {"residual", rc.residual},
                                   {"single_frozen_state", frozen_class},
                                   {"absorption_probability", analysis.absorption[ci]}});
            }
            out.files["absorption.csv"] = absorption;

            std::uint64_t no_double_zero = 0;
            for (std::size_t i = 0; i < gen.size(); ++i)
                no_double_zero += is_no_adjacent_zeros(gen.state(i)) ? 1 : 0;
            json summary;
            summary["L"] = length;
            summary["k"] = k;
            summary["states"] = gen.size();
            summary["communicating_classes"] = analysis.classes.size();
            summary["recurrent_classes"] = classes;
            summary["max_residual"] = analysis.max_residual;
            summary["max_tv_from_uniform"] = max_tv;
            summary["maximal_island_states"] = no_double_zero;
            summary["maximal_island_formula"] = maximal_island_count(length, k);
            out.files["summary.json"] = dump(summary);
        }

        void run_invariance(const ExperimentConfig& c, ExperimentOutput& out)
        {
            std::vector<double> rhos = c.analysis.rhos;
            if (rhos.empty())
                rhos = c.lattice.rho ? std::vector<double>{*c.lattice.rho} : std::vector<double>{0.6, 0.75, 0.9};
            std::string csv = "f_id,value\n";
            double worst = 0.0;
            json witnesses = json::array();
            for (double rho : rhos)
            {
                const auto mu = mu_measure(rho);
                for (std::size_t w = 1; w <= c.analysis.width_max; ++w)
                    for (std::uint64_t i = 0; i < (std::uint64_t{1} << w); ++i)
                    {
                        const Pattern p = Pattern::from_index(i, w);
                        const double v = generator_expectation(mu, CylinderFunction::indicator(p));
                        worst = std::max(worst, std::abs(v));
                        csv += "mu[" + fmt_double(rho) + "]:" + p.to_string() + ',' + fmt_double(v) + '\n';
                    }
                const double nu = generator_expectation(product_measure(rho), CylinderFunction::indicator(Pattern::parse("00")));
                const double expect = -rho * rho * (1.0 - rho) * (1.0 - rho);
                witnesses.push_back({{"rho", rho}, {"value", nu}, {"expected", expect}, {"error", std::abs(nu - expect)}});
            }
            out.files["invariance.csv"] = csv;
            json summary;
            summary["max_abs_value"] = worst;
            summary["tolerance"] = 1e-12;
            summary["bernoulli_witness_00"] = witnesses;
            out.files["summary.json"] = dump(summary);
            if (!(worst <= 1e-12))
                throw NumericalFailure("invariance residual " + fmt_double(worst) + " above 1e-12");
        }

        void run_limit_table(const ExperimentConfig& c, ExperimentOutput& out)
        {
            const double rho = lattice_rho(c);
            const LimitMeasureTable table = limit_table(rho, c.analysis.n_max);
            out.files["limit_table.csv"] = table.to_csv();
            const ConsistencyReport r = consistency_check(table);
            json summary;
            summary["rho"] = rho;
            summary["n_max"] = c.analysis.n_max;
            summary["max_right_violation"] = r.max_right;
            summary["max_left_violation"] = r.max_left;
            summary["max_total_violation"] = r.max_total;
            summary["min_value"] = r.min_value;
            summary["max_value"] = r.max_value;
            summary["worst_pattern"] = r.worst_pattern;
            summary["ballot_prob"] = ballot_prob(rho);
            out.files["summary.json"] = dump(summary);
            if (!(r.max_violation() <= 1e-12) || r.min_value < 0.0 || r.max_value > 1.0 || r.max_eleven != 0.0)
                throw NumericalFailure("limit table fails consistency at " + r.worst_pattern);
        }

        void run_critical(const ExperimentConfig& c, std::size_t workers, ExperimentOutput& out)
        {
            const RngStream root(c.seed, 0);
            const auto stats = critical_absorption_stats(c.lattice.length, c.trials, root, workers);
            out.files["absorption.csv"] = stats.absorption_csv();
            out.files["pair_decay.csv"] = stats.pair_decay_csv();
            json summary;
            summary["L"] = c.lattice.length;
            summary["trials"] = c.trials;
            summary["even"] = stats.even_count;
            summary["non_alternating"] = stats.non_alternating;
            summary["even_fraction"] = {{"point", stats.even_fraction.point},
                                        {"lower", stats.even_fraction.lower},
                                        {"upper", stats.even_fraction.upper},
                                        {"z_vs_half", stats.even_fraction.z.value_or(0.0)}};
            summary["absorption_time"] = {{"mean", stats.absorption_time.mean}, {"se", stats.absorption_time.se}};
            summary["f11_monotone_violations"] = stats.monotone_violations;
            out.files["summary.json"] = dump(summary);
            out.stream_ids = stream_ids(root, c.trials);
        }

        void run_freezing(const ExperimentConfig& c, std::size_t workers, ExperimentOutput& out)
        {
            const RngStream root(c.seed, 0);
            const double rho = lattice_rho(c);
            std::string mode = c.analysis.mode;
            if (mode == "auto")
                mode = rho < 0.5 ? "freezing" : "height";
            json summary;
            summary["rho"] = rho;
            summary["mode"] = mode;
            summary["trials"] = c.trials;
            if (mode == "freezing")
            {
                FreezingParams params;
                params.horizon = c.analysis.horizon;
                params.initial_half_width = c.analysis.initial_half_width;
                params.max_half_width = c.analysis.max_half_width;
                params.buffer_fraction = c.analysis.buffer_fraction;
                auto results = run_trials(c.trials, workers, [&](std::size_t i) {
                    const RngStream stream = root.substream(i);
                    return freezing_time_origin(bernoulli_site_law(rho, stream), stream, params);
                });
                std::string csv = "trial,verdict,freezing_time,origin_value,half_width,record_site,windows,events\n";
                std::uint64_t frozen = 0, conclusive = 0;
                for (std::size_t i = 0; i < results.size(); ++i)
                {
                    const auto& r = results[i];
                    std::uint64_t events = 0;
                    for (const auto& w : r.runs)
                        events += w.events;
                    frozen += r.verdict == FreezeVerdict::Frozen ? 1 : 0;
                    conclusive += r.conclusive() ? 1 : 0;
                    csv += std::to_string(i) + ',' + std::string(to_string(r.verdict)) + ',' +
                           fmt_double(r.freezing_time) + ',' + std::to_string(r.origin_value) + ',' +
                           std::to_string(r.half_width) + ',' + std::to_string(r.record_site) + ',' +
                           std::to_string(r.runs.size()) + ',' + std::to_string(events) + '\n';
                }
                out.files["freezing.csv"] = csv;
                const auto f = estimate_proportion(frozen, c.trials);
                const auto k = estimate_proportion(conclusive, c.trials);
                summary["frozen"] = {{"point", f.point}, {"lower", f.lower}, {"upper", f.upper}};
                summary["conclusive"] = {{"point", k.point}, {"lower", k.lower}, {"upper", k.upper}};
            }
            else
            {
                std::vector<double> checkpoints = c.analysis.checkpoints;
                if (checkpoints.empty())
                    checkpoints = {0.1 * c.analysis.horizon, c.analysis.horizon};
                auto results = run_trials(c.trials, workers, [&](std::size_t i) {
                    const RngStream stream = root.substream(i);
                    return height_probe_trial(bernoulli_site_law(rho, stream), stream, checkpoints);
                });
                std::string csv = "trial,t,h0\n";
                std::uint64_t grew = 0, looked_frozen = 0;
                for (std::size_t i = 0; i < results.size(); ++i)
                {
                    const auto& r = results[i];
                    for (std::size_t j = 0; j < r.checkpoints.size(); ++j)
                        csv += std::to_string(i) + ',' + fmt_double(r.checkpoints[j]) + ',' + std::to_string(r.heights[j]) + '\n';
                    grew += r.heights.back() > r.heights.front() ? 1 : 0;
                    looked_frozen += r.looks_frozen() ? 1 : 0;
                }
                out.files["height.csv"] = csv;
                summary["grew"] = grew;
                summary["looks_frozen"] = looked_frozen;
            }
            out.files["summary.json"] = dump(summary);
            out.stream_ids = stream_ids(root, c.trials);
        }

        void run_subcritical(const ExperimentConfig& c, std::size_t workers, ExperimentOutput& out)
        {
            const RngStream root(c.seed, 0);
            const auto report = subcritical_empirical_compare(lattice_rho(c), c.lattice.length, c.trials, root,
                                                              c.analysis.pattern_max, workers);
            out.files["patterns.csv"] = report.patterns_csv();
            json j;
            j["rho"] = report.rho;
            j["L"] = report.length;
            j["k"] = report.particles;
            j["trials"] = report.trials;
            j["unabsorbed"] = report.unabsorbed;
            j["caveat"] = report.caveat;
            j["max_abs_z"] = report.max_abs_z();
            json pats = json::array();
            for (const auto& p : report.patterns)
                pats.push_back({{"pattern", p.pattern.to_string()},
                                {"expected", p.expected},
                                {"observed", p.observed},
                                {"se", p.se},
                                {"ci", {p.pooled.lower, p.pooled.upper}},
                                {"z", std::isfinite(p.z) ? json(p.z) : json(p.z > 0 ? "inf" : "-inf")}});
            j["patterns"] = pats;
            out.files["report.json"] = dump(j);
            out.stream_ids = stream_ids(root, c.trials);
        }

        std::string manifest(const ExperimentConfig& c, const ExperimentOutput& out, double wall_seconds)
        {
            json m;
            m["version"] = std::string(kVersion);
            m["experiment"] = std::string(to_string(c.experiment));
            m["seed"] = c.seed;
            m["config"] = config_json(c);
            m["stream_ids"] = out.stream_ids;
            m["wall_time_seconds"] = wall_seconds;
            m["exit_code"] = out.exit_code;
            json files = json::array();
            for (const auto& [name, content] : out.files)
                files.push_back({{"name", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
            m["files"] = files;
            return dump(m);
        }
    }  // namespace

    std::string_view to_string(ExperimentKind kind) noexcept
    {
        for (const auto& [k, name] : kKinds)
            if (k == kind)
                return name;
        return "unknown";
    }

    std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) noexcept
    {
        for (const auto& [k, n] : kKinds)
            if (n == name)
                return k;
        return std::nullopt;
    }

    ExperimentConfig parse_config(std::string_view text)
    {
        const SourceMap map(text);
        json doc;
        try
        {
            doc = json::parse(text.begin(), text.end());
        }
        catch (const json::parse_error& e)
        {
            throw ConfigError(std::string("malformed JSON: ") + e.what(), map.line_of_offset(e.byte ? e.byte - 1 : 0));
        }

        ExperimentConfig c;
        const Reader top(doc, "", map);
        top.allow({"experiment", "lattice", "dynamics", "trials", "seed", "output", "analysis"});
        if (!top.has("experiment"))
            throw ConfigError("missing key 'experiment'", 0);
        const std::string name = top.string("experiment");
        const auto kind = parse_experiment_kind(name);
        if (!kind)
            top.fail("unknown experiment '" + name + "'", "experiment");
        c.experiment = *kind;

        if (top.has("lattice"))
        {
            const Reader r(top.raw("lattice"), "lattice", map);
            r.allow({"topology", "L", "k", "rho"});
            if (r.has("topology"))
            {
                const std::string t = r.string("topology");
                if (t == "ring")
                    c.lattice.topology = TopologyKind::Ring;
                else if (t == "segment")
                    c.lattice.topology = TopologyKind::Segment;
                else
                    r.fail("topology must be 'ring' or 'segment'", "topology");
            }
            if (r.has("L"))
                c.lattice.length = r.uint("L");
            if (r.has("k"))
                c.lattice.particles = r.uint("k");
            if (r.has("rho"))
                c.lattice.rho = r.number("rho");
        }
        if (top.has("dynamics"))
        {
            const Reader r(top.raw("dynamics"), "dynamics", map);
            r.allow({"t_max", "max_events", "snapshot_stride", "sample_dt", "sample_stride"});
            if (r.has("t_max"))
                c.dynamics.t_max = r.number("t_max");
            if (r.has("max_events"))
                c.dynamics.max_events = r.uint("max_events");
            if (r.has("snapshot_stride"))
                c.dynamics.snapshot_stride = r.uint("snapshot_stride");
            if (r.has("sample_dt"))
                c.dynamics.sample_dt = r.number("sample_dt");
            if (r.has("sample_stride"))
                c.dynamics.sample_stride = r.uint("sample_stride");
        }
        if (top.has("trials"))
            c.trials = top.uint("trials");
        if (top.has("seed"))
            c.seed = top.uint("seed");
        if (top.has("output"))
        {
            const Reader r(top.raw("output"), "output", map);
            r.allow({"dir", "trajectories"});
            if (r.has("dir"))
                c.output.dir = r.string("dir");
            if (r.has("trajectories"))
                c.output.trajectories = r.boolean("trajectories");
        }
        if (top.has("analysis"))
        {
            const Reader r(top.raw("analysis"), "analysis", map);
            r.allow({"n_max", "pattern_max", "width_max", "rhos", "horizon", "initial_half_width", "max_half_width",
                     "buffer_fraction", "mode", "checkpoints"});
            auto& a = c.analysis;
            if (r.has("n_max"))
                a.n_max = r.uint("n_max");
            if (r.has("pattern_max"))
                a.pattern_max = r.uint("pattern_max");
            if (r.has("width_max"))
                a.width_max = r.uint("width_max");
            if (r.has("rhos"))
                a.rhos = r.numbers("rhos");
            if (r.has("horizon"))
                a.horizon = r.number("horizon");
            if (r.has("initial_half_width"))
                a.initial_half_width = r.integer("initial_half_width");
            if (r.has("max_half_width"))
                a.max_half_width = r.integer("max_half_width");
            if (r.has("buffer_fraction"))
                a.buffer_fraction = r.number("buffer_fraction");
            if (r.has("mode"))
                a.mode = r.string("mode");
            if (r.has("checkpoints"))
                a.checkpoints = r.numbers("checkpoints");
        }

        try
        {
            validate_config(c);
        }
        catch (const ConfigError& e)
        {
            if (e.line() != 0)
                throw;
            // Point at the first key named in the message, if any.
            const std::string msg = e.what();
            const auto q = msg.find('\'');
            std::size_t line = 0;
            if (q != std::string::npos)
            {
                const auto q2 = msg.find('\'', q + 1);
                const std::string key = msg.substr(q + 1, q2 - q - 1);
                const auto dot = key.find('.');
                line = dot == std::string::npos ? map.line_of("", key) : map.line_of(key.substr(0, dot), key.substr(dot + 1));
            }
            throw ConfigError(msg, line);
        }
        return c;
    }

    void validate_config(const ExperimentConfig& c)
    {
        auto fail = [](const std::string& m) { throw ConfigError(m, 0); };
        const auto& lat = c.lattice;
        const bool ring = lat.topology == TopologyKind::Ring;
        if (c.trials == 0)
            fail("'trials' must be positive");
        if (lat.rho && !(*lat.rho >= 0.0 && *lat.rho <= 1.0))
            fail("'lattice.rho' must lie in [0, 1]");
        if (lat.particles && *lat.particles > lat.length)
            fail("'lattice.k' exceeds 'lattice.L'");
        if (!(c.dynamics.t_max > 0.0))
            fail("'dynamics.t_max' must be positive");
        if (c.dynamics.sample_dt < 0.0)
            fail("'dynamics.sample_dt' must be non-negative");
        if (c.output.dir.empty())
            fail("'output.dir' must not be empty");

        auto need_ring = [&](std::size_t min_length) {
            if (!ring)
                fail("'lattice.topology' must be 'ring' for " + std::string(to_string(c.experiment)));
            if (lat.length < min_length)
                fail("'lattice.L' must be at least " + std::to_string(min_length));
        };
        auto need_subcritical_rho = [&]() {
            if (!lat.rho || !(*lat.rho > 0.0 && *lat.rho < 0.5))
                fail("'lattice.rho' must lie in (0, 1/2) for " + std::string(to_string(c.experiment)));
        };

        switch (c.experiment)
        {
        case ExperimentKind::Simulate:
            break;
        case ExperimentKind::RingExact:
            need_ring(3);
            if (lat.length > kMaxExactRing)
                fail("'lattice.L' must be at most " + std::to_string(kMaxExactRing) + " for ring-exact");
            if (!lat.particles)
                fail("'lattice.k' is required for ring-exact");
            break;
        case ExperimentKind::InvarianceCheck:
            if (c.analysis.width_max == 0 || c.analysis.width_max > 8)
                fail("'analysis.width_max' must lie in [1, 8]");
            for (double r : c.analysis.rhos)
                if (!(r > 0.5 && r < 1.0))
                    fail("'analysis.rhos' entries must lie in (1/2, 1)");
            if (c.analysis.rhos.empty() && lat.rho && !(*lat.rho > 0.5 && *lat.rho < 1.0))
                fail("'lattice.rho' must lie in (1/2, 1) for invariance-check");
            break;
        case ExperimentKind::LimitTable:
            need_subcritical_rho();
            if (c.analysis.n_max == 0 || c.analysis.n_max > kMaxLimitPattern)
                fail("'analysis.n_max' must lie in [1, 24]");
            break;
        case ExperimentKind::CriticalAbsorption:
            need_ring(4);
            if (lat.length % 2 != 0)
                fail("'lattice.L' must be even for critical-absorption");
            if (lat.particles && *lat.particles * 2 != lat.length)
                fail("'lattice.k' must equal L/2 for critical-absorption");
            break;
        case ExperimentKind::FreezingScan:
            if (!lat.rho || !(*lat.rho > 0.0 && *lat.rho < 1.0))
                fail("'lattice.rho' must lie in (0, 1) for freezing-scan");
            if (c.analysis.mode != "auto" && c.analysis.mode != "freezing" && c.analysis.mode != "height")
                fail("'analysis.mode' must be auto, freezing or height");
            if (!(c.analysis.horizon > 0.0))
                fail("'analysis.horizon' must be positive");
            if (c.analysis.initial_half_width < 2 || c.analysis.max_half_width < c.analysis.initial_half_width)
                fail("'analysis.initial_half_width' must be >= 2 and <= max_half_width");
            if (!(c.analysis.buffer_fraction >= 0.0 && c.analysis.buffer_fraction < 0.5))
                fail("'analysis.buffer_fraction' must lie in [0, 1/2)");
            if (!std::is_sorted(c.analysis.checkpoints.begin(), c.analysis.checkpoints.end()))
                fail("'analysis.checkpoints' must be ascending");
            break;
        case ExperimentKind::SubcriticalCompare:
            need_ring(3);
            need_subcritical_rho();
            if (c.analysis.pattern_max == 0 || c.analysis.pattern_max > 16 || c.analysis.pattern_max > lat.length)
                fail("'analysis.pattern_max' must lie in [1, min(16, L)]");
            if (lat.particles &&
                *lat.particles != static_cast<std::size_t>(std::llround(*lat.rho * static_cast<double>(lat.length))))
                fail("'lattice.k' must equal round(rho L) for subcritical-compare");
            break;
        }
        if (c.experiment == ExperimentKind::Simulate)
        {
            if (!lat.particles && !lat.rho)
                fail("'lattice.k' or 'lattice.rho' is required for simulate");
            if (lat.particles && !ring)
                fail("'lattice.k' needs a ring topology");
            if (!ring && lat.length < 1)
                fail("'lattice.L' must be positive");
            if (ring && lat.length < 3)
                fail("'lattice.L' must be at least 3 on a ring");
        }
    }

    ExperimentConfig load_config(const std::filesystem::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot read config file " + path.string(), 0);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str());
    }

    std::string config_to_json(const ExperimentConfig& config) { return dump(config_json(config)); }

    ExperimentOutput execute(const ExperimentConfig& config, std::size_t workers)
    {
        validate_config(config);
        ExperimentOutput out;
        try
        {
            switch (config.experiment)
            {
            case ExperimentKind::Simulate:
                run_simulate(config, workers, out);
                break;
            case ExperimentKind::RingExact:
                run_ring_exact(config, out);
                break;
            case ExperimentKind::InvarianceCheck:
                run_invariance(config, out);
                break;
            case ExperimentKind::LimitTable:
                run_limit_table(config, out);
                break;
            case ExperimentKind::CriticalAbsorption:
                run_critical(config, workers, out);
                break;
            case ExperimentKind::FreezingScan:
                run_freezing(config, workers, out);
                break;
            case ExperimentKind::SubcriticalCompare:
                run_subcritical(config, workers, out);
                break;
            }
        }
        catch (const NumericalFailure& e)
        {
            out.exit_code = kExitNumerical;
            out.message = e.what();
        }
        catch (const std::runtime_error& e)
        {
            // Linear solves report residual failures this way.
            if (dynamic_cast<const ConfigError*>(&e))
                throw;
            out.exit_code = kExitNumerical;
            out.message = e.what();
            out.files.clear();
        }
        return out;
    }

    int run_experiment(const ExperimentConfig& config, std::size_t workers, std::string& log)
    {
        namespace fs = std::filesystem;
        const auto started = std::chrono::steady_clock::now();
        ExperimentOutput out;
        try
        {
            out = execute(config, workers);
        }
        catch (const ConfigError& e)
        {
            log += std::string("config error: ") + e.what() + '\n';
            return kExitConfig;
        }
        catch (const std::logic_error& e)
        {
            log += std::string("config error: ") + e.what() + '\n';
            return kExitConfig;
        }
        if (out.exit_code != kExitOk)
            log += "numerical check failed: " + out.message + '\n';
        if (out.files.empty())
            return out.exit_code;
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        const fs::path target = fs::absolute(config.output.dir).lexically_normal();
        const fs::path parent = target.has_filename() ? target.parent_path() : target.parent_path().parent_path();
        const fs::path dest = target.has_filename() ? target : target.parent_path();
        std::error_code ec;
        if (fs::exists(dest) && !(fs::is_directory(dest) && (fs::is_empty(dest) || fs::exists(dest / "manifest.json"))))
        {
            log += "config error: output directory " + dest.string() + " exists and is not a previous run\n";
            return kExitConfig;
        }
        fs::create_directories(parent, ec);
        const fs::path staging = parent / ("." + dest.filename().string() + ".staging-" + std::to_string(::getpid()));
        try
        {
            fs::remove_all(staging);
            fs::create_directories(staging);
            for (const auto& [name, content] : out.files)
            {
                std::ofstream f(staging / name, std::ios::binary);
                f.write(content.data(), static_cast<std::streamsize>(content.size()));
                if (!f)
                    throw std::runtime_error("cannot write " + (staging / name).string());
            }
            std::ofstream mf(staging / "manifest.json", std::ios::binary);
            mf << manifest(config, out, wall);
            if (!mf)
                throw std::runtime_error("cannot write manifest");
            mf.close();
            if (fs::exists(dest))
                fs::remove_all(dest);
            fs::rename(staging, dest);
        }
        catch (const std::exception& e)
        {
            fs::remove_all(staging, ec);
            log += std::string("output error: ") + e.what() + '\n';
            return kExitConfig;
        }
        log += "wrote " + std::to_string(out.files.size() + 1) + " files to " + dest.string() + '\n';
        return out.exit_code;
    }

    std::string sha256_hex(std::string_view data)
    {
        unsigned char digest[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
        static constexpr char hex[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i)
        {
            out += hex[digest[i] >> 4];
            out += hex[digest[i] & 15];
        }
        return out;
    }
}  // namespace ftasep
