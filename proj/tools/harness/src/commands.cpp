// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/harness/commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "minseek/validate/complexity.hpp"
#include "minseek/validate/metrics.hpp"

namespace minseek::harness {

namespace {

using nlohmann::ordered_json;

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
}

std::unique_ptr<TokenSource> make_source(const RunConfig& config, const ModelConfig& model_config,
                                         std::size_t prompt_index) {
    if (config.script) {
        return std::make_unique<ScriptedSource>(Script::load(*config.script), model_config);
    }
    if (config.random_script) {
        const RandomScript& r = *config.random_script;
        return std::make_unique<ScriptedSource>(
            Script::random(r.thoughts, r.min_len, r.max_len, r.seed + prompt_index), model_config);
    }
    return std::make_unique<SamplingSource>(config.sampling, config.seed + prompt_index);
}

std::string sci(double v) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(3) << v;
    return s.str();
}

std::string fixed(double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

struct CellRun {
    ScalingPolicy policy;
    std::size_t prompt_index = 0;
    GenerationResult result;
};

std::vector<CellRun> run_grid(const Model& model, const RunConfig& config, const RunOptions& options) {
    std::vector<CellRun> runs;
    for (const ScalingPolicy& policy : config.expand()) {
        for (std::size_t p = 0; p < config.prompts.size(); ++p) {
            runs.push_back(CellRun{policy, p, run_cell(model, config, policy, p, options)});
        }
    }
    return runs;
}

std::chrono::nanoseconds total_wall(const std::vector<CostRecord>& costs) {
    std::chrono::nanoseconds total{0};
    for (const CostRecord& c : costs) {
        total += c.wall_time;
    }
    return total;
}

}  // namespace

std::string cell_name(const ScalingPolicy& policy, std::size_t prompt_index) {
    return policy.label() + "_p" + std::to_string(prompt_index);
}

GenerationResult run_cell(const Model& model, const RunConfig& config, const ScalingPolicy& policy,
                          std::size_t prompt_index, const RunOptions& options) {
    DualKvCache cache(CacheShape::from_model(model.config()), options.checked);
    auto source = make_source(config, model.config(), prompt_index);
    return run_generation(model, cache, config.prompts.at(prompt_index), policy, *source, options);
}

std::vector<BoundaryReport> validate_boundaries(const Model& model, const RunConfig& config) {
    std::vector<BoundaryReport> reports;
    for (const ScalingPolicy& policy : config.expand()) {
        for (std::size_t p = 0; p < config.prompts.size(); ++p) {
            const std::string name = cell_name(policy, p);
            RunOptions options;
            options.checked = true;
            options.trace_tokens = false;
            options.record_costs = false;
            options.skip_rematerialize = config.inject_fault;
            options.on_boundary = [&](const BoundaryCheck& check) {
                BoundaryReport r;
                r.cell = name;
                r.boundary = check.boundary_index;
                r.rows = check.resident_tokens.size();
                r.recompute = compare_logits(check.logits, recompute_oracle(check.resident_tokens, model));
                r.cache = compare_logits(check.logits,
                                         cache_conditioned_oracle(*check.cache, model, check.resident_tokens.back()));
                r.pass = config.oracle == OracleKind::kRecompute ? r.recompute.within : r.cache.within;
                reports.push_back(r);
            };
            run_cell(model, config, policy, p, options);
        }
    }
    return reports;
}

int cmd_run(const RunConfig& config, std::ostream& out) {
    config.validate();
    const Model model(config.load_model(), config.model_seed);
    RunOptions options;
    options.checked = config.checked;
    options.skip_rematerialize = config.inject_fault;
    const std::vector<ScalingPolicy> cells = config.expand();
    if (config.trace_out && cells.size() * config.prompts.size() != 1) {
        throw ConfigError("--trace-out needs a single grid cell and prompt, got " +
                          std::to_string(cells.size() * config.prompts.size()));
    }
    for (const ScalingPolicy& policy : cells) {
        for (std::size_t p = 0; p < config.prompts.size(); ++p) {
            const GenerationResult r = run_cell(model, config, policy, p, options);
            const std::string name = cell_name(policy, p);
            const std::filesystem::path trace_path =
                config.trace_out ? *config.trace_out : config.output_dir / (name + ".trace");
            std::filesystem::path transcript_path = trace_path;
            transcript_path.replace_extension(".transcript");
            write_file(trace_path, r.trace.to_text());
            write_file(transcript_path, r.transcript.to_text());
            out << name << " tokens=" << r.stats.tokens_generated << " cycles=" << r.stats.rc_count
                << " max_rows=" << r.stats.max_rows << " end=" << r.transcript.termination << " -> "
                << trace_path.string() << '\n';
        }
    }
    return 0;
}

int cmd_validate(const RunConfig& config, std::ostream& out) {
    config.validate();
    const Model model(config.load_model(), config.model_seed);
    const std::vector<BoundaryReport> reports = validate_boundaries(model, config);
    const BoundaryReport* first_failure = nullptr;
    for (const BoundaryReport& r : reports) {
        out << r.cell << " boundary=" << r.boundary << " rows=" << r.rows
            << " recompute_dev=" << sci(r.recompute.max_rel_dev) << " cache_dev=" << sci(r.cache.max_rel_dev) << ' '
            << (r.pass ? "ok" : "FAIL") << '\n';
        if (!r.pass && first_failure == nullptr) {
            first_failure = &r;
        }
    }
    out << "oracle=" << to_string(config.oracle) << " tolerance=1e-4 boundaries=" << reports.size();
    if (first_failure != nullptr) {
        out << " FAIL first at " << first_failure->cell << " boundary " << first_failure->boundary << '\n';
        return 1;
    }
    out << " PASS\n";
    return 0;
}

int cmd_bench(const RunConfig& config, std::ostream& out) {
    config.validate();
    const Model model(config.load_model(), config.model_seed);
    RunOptions options;
    options.trace_tokens = false;
    const std::vector<CellRun> runs = run_grid(model, config, options);

    ordered_json summary = ordered_json::array();
    out << std::left << std::setw(28) << "cell" << std::setw(10) << "tokens" << std::setw(8) << "cycles"
        << std::setw(16) << "scores" << std::setw(10) << "max_rows" << std::setw(12) << "linear_r2" << "quad_r2\n";
    for (const CellRun& run : runs) {
        const std::string name = cell_name(run.policy, run.prompt_index);
        const auto& costs = run.result.costs;
        std::ostringstream cost_dat;
        for (const CostRecord& c : costs) {
            cost_dat << c.cumulative_tokens << ' ' << c.cumulative_scores << '\n';
        }
        write_file(config.output_dir / (name + "_cost.dat"), cost_dat.str());
        std::ostringstream cycle_dat;
        const std::vector<double> per_cycle = mean_cost_per_cycle(costs);
        for (std::size_t i = 0; i < per_cycle.size(); ++i) {
            cycle_dat << i << ' ' << fixed(per_cycle[i], 3) << '\n';
        }
        write_file(config.output_dir / (name + "_cycle.dat"), cycle_dat.str());

        ordered_json cell{{"cell", name},
                          {"tokens", run.result.stats.tokens_generated},
                          {"cycles", run.result.stats.rc_count},
                          {"attention_scores", costs.empty() ? 0 : costs.back().cumulative_scores},
                          {"wall_ms", std::chrono::duration<double, std::milli>(total_wall(costs)).count()},
                          {"max_rows", run.result.stats.max_rows}};
        std::string linear = "n/a";
        std::string quad = "n/a";
        if (per_cycle.size() >= 20) {
            const ComplexityFit fit = fit_complexity(costs);
            cell["linear_r2"] = fit.linear_r2;
            cell["quadratic_r2"] = fit.quadratic_r2;
            cell["slope"] = fit.slope;
            cell["quad_a"] = fit.quad_a;
            linear = fixed(fit.linear_r2, 5);
            quad = fixed(fit.quadratic_r2, 5);
        }
        summary.push_back(cell);
        out << std::setw(28) << name << std::setw(10) << run.result.stats.tokens_generated << std::setw(8)
            << run.result.stats.rc_count << std::setw(16) << cell["attention_scores"].get<std::uint64_t>()
            << std::setw(10) << run.result.stats.max_rows << std::setw(12) << linear << quad << '\n';
    }
    write_file(config.output_dir / "bench_summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_compare(const RunConfig& config, std::ostream& out) {
    config.validate();
    const Model model(config.load_model(), config.model_seed);
    RunOptions options;
    options.trace_tokens = false;
    const std::vector<CellRun> runs = run_grid(model, config, options);

    // Per (method, variant) group: summed cost per M over prompts.
    struct Group {
        MetricByLimit scores;
        MetricByLimit wall;
    };
    std::map<std::string, Group> groups;
    for (const CellRun& run : runs) {
        std::string group(to_string(run.policy.method));
        if (run.policy.method == Method::kMinSeek) {
            group += "_v" + std::to_string(run.policy.variant);
        }
        const auto& costs = run.result.costs;
        groups[group].scores[run.policy.max_rc] += costs.empty() ? 0.0 : static_cast<double>(costs.back().cumulative_scores);
        groups[group].wall[run.policy.max_rc] += std::chrono::duration<double>(total_wall(costs)).count();
    }

    ordered_json summary = ordered_json::object();
    out << std::left << std::setw(16) << "group" << std::setw(8) << "M" << std::setw(16) << "norm_scores"
        << "norm_wall\n";
    for (const auto& [name, group] : groups) {
        const MetricByLimit scores = normalize(group.scores);
        const MetricByLimit wall = normalize(group.wall);
        std::ostringstream dat;
        ordered_json rows = ordered_json::array();
        for (const auto& [limit, value] : scores) {
            const std::string m = format_rc_limit(limit);
            dat << m << ' ' << fixed(value, 6) << '\n';
            rows.push_back({{"M", m}, {"normalized_scores", value}, {"normalized_wall", wall.at(limit)}});
            out << std::setw(16) << name << std::setw(8) << m << std::setw(16) << fixed(value, 4)
                << fixed(wall.at(limit), 4) << '\n';
        }
        write_file(config.output_dir / ("compare_" + name + "_time.dat"), dat.str());
        summary[name] = rows;
    }
    write_file(config.output_dir / "compare_summary.json", summary.dump(2) + "\n");
    return 0;
}

int dispatch(const RunConfig& config, std::ostream& out) {
    switch (config.mode) {
        case Mode::kRun:
            return cmd_run(config, out);
        case Mode::kValidate:
            return cmd_validate(config, out);
        case Mode::kBench:
            return cmd_bench(config, out);
        case Mode::kCompare:
            return cmd_compare(config, out);
    }
    return 2;
}

}  // namespace minseek::harness
