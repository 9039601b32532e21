#include <iostream>

#include <CLI11.hpp>

#include "epp/workbench.hpp"

namespace {

// Built-in smoke test: no files, fixed fast configuration, a few seconds at
// most.  Exercises the frame algebra, the closed-form S-matrix and one
// independent integration.
int run_selfcheck(std::ostream& out) {
    using namespace epp;
    const ChannelModel model({1.0, 2.0});
    const TransformSpec spec(Complex(1.0, 2.0), ComplexOrthogonal(Matrix::Identity(1, 1)), 1);
    validate_spec(model, spec);
    bool ok = true;

    const RealMatrix om = omega(spec);
    const RealMatrix id = RealMatrix::Identity(2, 2);
    const double e_im = spec.energy().imag();
    const double frame_dev =
        std::max(max_abs(RealMatrix(om + om.transpose())),
                 max_abs(RealMatrix(om.transpose() * om / (e_im * e_im) - id)));
    ok = ok && frame_dev <= 1e-12;
    out << "selfcheck: asymptotic frame dev " << frame_dev << "\n";

    double phase_dev = 0.0;
    for (const double k : {0.8, 1.6}) {
        const auto phases = eigenphases_symmetric_unitary(s2_matrix(model, spec, k));
        std::vector<double> ref;
        for (double a : model.a_values()) ref.push_back(-std::atan(k / a));
        std::sort(ref.begin(), ref.end());
        for (std::size_t j = 0; j < ref.size(); ++j)
            phase_dev = std::max(phase_dev, std::abs(phases[j] - ref[j]));
    }
    ok = ok && phase_dev <= 1e-10;
    out << "selfcheck: closed-form phase dev " << phase_dev << "\n";

    VerifyOptions opt;
    opt.grid = RadialGrid{1e-3, 15.0, 5e-3};
    const ScatterReport report = verify_epp(model, spec, {1.2}, opt);
    ok = ok && report.pass;
    out << "selfcheck: integrated phase dev " << report.max_oracle_deviation << ", unitarity "
        << report.max_unitarity_defect << "\n";

    out << (ok ? "selfcheck: ok" : "selfcheck: FAILED") << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eigen-phase preserving deformations of coupled-channel scattering"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    int grid_points_override = 0;
    double tol_override = 0.0;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_override, "override the output directory");
        sub->add_option("--grid-points", grid_points_override,
                        "override the radial grid point count");
        sub->add_option("--tol-eigenphase", tol_override,
                        "override the eigen-phase verification tolerance");
    };

    CLI::App* transform =
        app.add_subcommand("transform", "tabulate the deformed potential and its frame");
    CLI::App* verify =
        app.add_subcommand("verify", "re-derive the S-matrix by integration and check invariants");
    CLI::App* figures = app.add_subcommand("figures", "emit plotting tables");
    add_common(transform);
    add_common(verify);
    add_common(figures);
    app.add_subcommand("selfcheck", "run the built-in smoke test");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    return epp::run_cli([&]() -> int {
        if (app.got_subcommand("selfcheck")) return run_selfcheck(std::cout);
        epp::RunConfig config = epp::load_config(config_path);
        if (!out_override.empty()) config.out_dir = out_override;
        if (grid_points_override > 0) config.grid_points = grid_points_override;
        if (tol_override > 0.0) config.tol_eigenphase = tol_override;
        if (app.got_subcommand(transform)) return epp::cmd_transform(config);
        if (app.got_subcommand(verify)) return epp::cmd_verify(config);
        return epp::cmd_figures(config);
    });
}
