// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "minseek/harness/commands.hpp"

using namespace minseek;

int main(int argc, char** argv) {
    CLI::App app{"minseek: sequential test-time scaling engine with a Min-Seek KV cache"};

    std::string mode;
    std::string config_path;
    std::string method;
    std::optional<int> variant;
    std::string max_rc;
    std::optional<std::size_t> token_limit;
    std::optional<std::size_t> segment_cap;
    std::optional<std::uint64_t> seed;
    std::string trace_out;
    bool checked = false;
    std::string script;
    std::optional<std::size_t> random_thoughts;
    std::string output_dir;
    std::string oracle;
    bool inject_fault = false;

    app.add_option("mode", mode, "run | validate | bench | compare (default: config mode, else run)");
    app.add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
    app.add_option("--method", method, "minseek | budget | standard");
    app.add_option("--variant", variant, "Min-Seek finalization variant")->check(CLI::IsMember({1, 2}));
    app.add_option("--max-rc", max_rc, "maximum induced cycles M, or inf");
    app.add_option("--token-limit", token_limit, "soft generation token limit");
    app.add_option("--segment-cap", segment_cap, "u: rows per thought segment");
    app.add_option("--seed", seed, "sampling seed");
    app.add_option("--trace-out", trace_out, "trace path for a single-cell run");
    app.add_flag("--checked", checked, "cache consistency and bound assertions");
    app.add_option("--script", script, "scripted-model fixture (JSON)")->check(CLI::ExistingFile);
    app.add_option("--random-thoughts", random_thoughts,
                   "script N closed thoughts with random lengths in [4, segment cap]");
    app.add_option("--output-dir", output_dir, "output directory (default $MINSEEK_OUTPUT_DIR or minseek_out)");
    app.add_option("--oracle", oracle, "validate reference: recompute | cache");
    app.add_flag("--inject-fault", inject_fault, "skip key re-encoding after evictions (negative control)");

    CLI11_PARSE(app, argc, argv);

    try {
        harness::RunConfig config;
        if (!config_path.empty()) {
            config = harness::load_run_config(config_path);
        } else {
            config.output_dir = harness::default_output_dir();
        }
        if (!mode.empty()) {
            config.mode = harness::parse_mode(mode);
        }
        if (!method.empty()) {
            config.grid.methods = {parse_method(method)};
        }
        if (variant) {
            config.grid.variants = {*variant};
        }
        if (!max_rc.empty()) {
            config.grid.max_rc = {parse_rc_limit(max_rc)};
        }
        if (token_limit) {
            config.token_limit = *token_limit;
        }
        if (segment_cap) {
            config.segment_cap = *segment_cap;
        }
        if (seed) {
            config.seed = *seed;
        }
        if (!trace_out.empty()) {
            config.trace_out = trace_out;
        }
        config.checked = config.checked || checked;
        if (!script.empty()) {
            config.script = script;
        }
        if (random_thoughts) {
            harness::RandomScript r;
            r.thoughts = *random_thoughts;
            r.max_len = config.segment_cap;
            r.seed = config.seed;
            config.random_script = r;
        }
        if (!output_dir.empty()) {
            config.output_dir = output_dir;
        }
        if (!oracle.empty()) {
            config.oracle = harness::parse_oracle(oracle);
        }
        config.inject_fault = inject_fault;
        return harness::dispatch(config, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
