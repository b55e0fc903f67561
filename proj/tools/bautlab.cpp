// bautlab validate|report|compare <file>
//
// exit codes: 0 success, 1 parse/schema error, 2 algebra validation failure,
// 3 window too small (or models that cannot be compared)
#include <chrono>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "bautlab/error.hpp"
#include "bautlab/io.hpp"

using namespace bautlab;

namespace {

struct Flags {
    std::string file;
    std::optional<int> max_degree;
    std::optional<int> trust_margin;
    std::optional<std::string> variant;
    bool reduced = false, unreduced = false;
    std::string format = "text";
    std::optional<int> full_max_degree;
};

ModelSpec load(const Flags& f) {
    ModelSpec spec = load_document(f.file);
    if (f.max_degree) spec.max_degree = *f.max_degree;
    if (f.trust_margin) spec.trust_margin = *f.trust_margin;
    if (f.variant) {
        spec.variant = *f.variant == "simplified" ? Variant::Simplified : Variant::Full;
        if (spec.variant == Variant::Simplified && !f.unreduced) spec.reduced = true;
    }
    if (f.reduced) spec.reduced = true;
    if (f.unreduced) spec.reduced = false;
    if (spec.max_degree < 1) throw Error(ErrorKind::SchemaError, "--max-degree must be at least 1");
    if (spec.variant == Variant::Simplified && !spec.reduced)
        throw Error(ErrorKind::SchemaError, "the simplified model is the based variant; drop --unreduced");
    return spec;
}

void emit(const Json& j, const std::string& text, const Flags& f, double seconds) {
    if (f.format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << text;
        std::cout << "time: " << std::fixed << std::setprecision(2) << seconds << " s\n";
    }
}

int run_validate(const Flags& f) {
    auto t0 = std::chrono::steady_clock::now();
    ValidationSummary v = validate_spec(load(f));
    emit(to_json(v), to_text(v), f, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return v.ok() ? 0 : 2;
}

int run_report(const Flags& f) {
    auto t0 = std::chrono::steady_clock::now();
    AssembledModel m = build_model(load(f));
    HomotopyReport r = rational_homotopy_report(m);
    emit(to_json(m, r), to_text(m, r), f, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return m.ok() ? 0 : 2;
}

int run_compare(const Flags& f) {
    auto t0 = std::chrono::steady_clock::now();
    ModelSpec spec = load(f);
    if (!spec.has_classes)
        throw Error(ErrorKind::SchemaError, "compare needs characteristic-class twisting");
    ModelSpec ss = spec, fs = spec;
    ss.variant = Variant::Simplified;
    fs.variant = Variant::Full;
    ss.reduced = fs.reduced = true;
    if (f.full_max_degree) fs.max_degree = *f.full_max_degree;
    AssembledModel s = simplified_model(ss);
    AssembledModel full = full_model(fs);
    ComparisonReport c = comparison_morphism(s, full);
    emit(to_json(s, full, c), to_text(s, full, c), f,
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return c.quasi_iso && s.ok() && full.ok() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rational models for classifying spaces of bundle automorphisms"};
    app.require_subcommand(1);
    Flags f;

    auto common = [&](CLI::App* sub, bool model_flags) {
        sub->add_option("file", f.file, "model file (.json or .toml)")->required()->check(CLI::ExistingFile);
        sub->add_option("--max-degree", f.max_degree, "report homology up to this degree");
        sub->add_option("--trust-margin", f.trust_margin, "extra degrees built beyond --max-degree (default 2)");
        sub->add_option("--format", f.format, "text or json")->check(CLI::IsMember({"text", "json"}));
        if (model_flags) {
            sub->add_option("--variant", f.variant, "full or simplified")->check(CLI::IsMember({"full", "simplified"}));
            sub->add_flag("--reduced", f.reduced, "use reduced chains (based variant)");
            sub->add_flag("--unreduced", f.unreduced, "use unreduced chains");
            sub->get_option("--reduced")->excludes(sub->get_option("--unreduced"));
        }
    };
    auto* validate_cmd = app.add_subcommand("validate", "check the input and every algebraic identity");
    auto* report_cmd = app.add_subcommand("report", "homology and rational homotopy of the model");
    auto* compare_cmd = app.add_subcommand("compare", "compare the simplified and full based models");
    common(validate_cmd, true);
    common(report_cmd, true);
    common(compare_cmd, false);
    compare_cmd->add_option("--full-max-degree", f.full_max_degree, "build the full side in a different window");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*validate_cmd) return run_validate(f);
        if (*report_cmd) return run_report(f);
        return run_compare(f);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
