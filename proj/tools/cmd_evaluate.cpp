#include <iostream>
#include <memory>

#include "commands.hpp"
#include "vqloc/fs_util.hpp"
#include "vqloc/metrics.hpp"

namespace vqloc::cli {

namespace {

struct EvaluateCmd {
    std::string results;
    std::string annotations;
    std::string out;
    bool temporal_success = false;
};

void run(const EvaluateCmd& o) {
    const auto results = parse_results(read_file(o.results));
    const auto annotations = parse_annotations(read_file(o.annotations));
    EvaluateOptions options;
    options.temporal_success = o.temporal_success;
    const Report report = evaluate(results, annotations, options);
    const std::string json = report_to_json(report);
    write_file_atomic(o.out, json);
    std::cout << json;
}

}  // namespace

void add_evaluate(CLI::App& app) {
    auto o = std::make_shared<EvaluateCmd>();
    auto* sub = app.add_subcommand("evaluate", "score results against annotations");
    sub->add_option("--results", o->results, "results.json")->required()->check(CLI::ExistingFile);
    sub->add_option("--annotations", o->annotations, "annotations.json")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o->out, "report.json to write")->required();
    sub->add_flag("--temporal-success", o->temporal_success, "use temporal IoU for the success rate");
    sub->callback([o] { run(*o); });
}

}  // namespace vqloc::cli
