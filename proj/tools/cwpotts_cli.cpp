// Command-line front end over the C interface.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cwpotts/cwpotts.h"

namespace {

struct CallFailed {
    cwp_status status;
    std::string message;
};

void check(cwp_status s)
{
    if (s != CWP_OK)
        throw CallFailed{s, cwp_last_error()};
}

int exit_code(cwp_status s)
{
    switch (s) {
    case CWP_ERR_NON_CONVERGENCE: return 3;
    case CWP_ERR_INTERNAL: return 1;
    default: return 2;
    }
}

template <class Fn>
std::string fetch_json(Fn&& fn)
{
    std::size_t needed = 0;
    cwp_status s = fn(nullptr, 0, &needed);
    if (s != CWP_ERR_BUFFER_TOO_SMALL)
        check(s);
    std::string buf(needed, '\0');
    check(fn(buf.data(), buf.size(), &needed));
    buf.resize(needed - 1);
    return buf;
}

std::string num(double x)
{
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

const char* tag_label(int t)
{
    static const char* names[] = {"Regular", "StronglyCritical", "WeaklyCritical", "SpecialTypeI", "SpecialTypeII"};
    return t >= 0 && t < 5 ? names[t] : "Unknown";
}

struct LawHandle {
    cwp_law* ptr = nullptr;
    ~LawHandle() { cwp_law_free(ptr); }
};

struct ExactHandle {
    cwp_exact_law* ptr = nullptr;
    ~ExactHandle() { cwp_exact_law_free(ptr); }
};

struct DiagramHandle {
    cwp_diagram* ptr = nullptr;
    ~DiagramHandle() { cwp_diagram_free(ptr); }
};

struct Config {
    int p = 2;
    int q = 2;
    double beta = 0.0;
    double h = 0.0;
    int N = 100;
    std::size_t samples = 1000;
    std::uint64_t seed = 42;
    double alpha = 0.05;
    std::string out = "-";
    std::string format = "csv";
    int resolution = 200;

    std::vector<double> beta_range;
    std::vector<double> h_range;
    std::string landmarks_out;
    std::string dump;
    std::string method = "exact";
    int sweeps = 2000;
    int burn_in = 500;
    int thin = 1;
    std::vector<double> direction;
    std::string density_out;
    int density_points = 401;
    std::string axis = "h";
    std::string data;
    bool simulate = false;
    std::string ci_method = "plain";
    std::optional<double> estimate;
    double tolerance = 0.05;

    cwp_spec spec() const { return {p, q, beta, h}; }
};

class Output {
public:
    explicit Output(const std::string& path)
    {
        if (path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_)
                throw CallFailed{CWP_ERR_IO, "cannot open " + path};
        }
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void write_json(const Config& c, const std::string& text)
{
    Output o(c.out);
    o.os() << text << '\n';
}

std::vector<double> default_direction(const Config& c)
{
    if (!c.direction.empty()) {
        if (static_cast<int>(c.direction.size()) != c.q)
            throw CallFailed{CWP_ERR_SHAPE, "--direction needs q entries"};
        return c.direction;
    }
    std::vector<double> d(static_cast<std::size_t>(c.q), 0.0);
    d[0] = 1.0;
    return d;
}

std::vector<double> draw_exact(const cwp_spec& spec, int N, std::size_t n, std::uint64_t seed)
{
    ExactHandle law;
    check(cwp_exact_law_create(&spec, N, &law.ptr));
    std::vector<double> xs(n * static_cast<std::size_t>(spec.q));
    check(cwp_exact_sample(law.ptr, n, seed, xs.data(), xs.size()));
    return xs;
}

// ---- commands ----

void cmd_classify(const Config& c)
{
    const cwp_spec s = c.spec();
    write_json(c, fetch_json([&](char* b, std::size_t n, std::size_t* need) { return cwp_classify_json(&s, b, n, need); }));
}

void cmd_landmarks(const Config& c)
{
    const std::string text =
        fetch_json([&](char* b, std::size_t n, std::size_t* need) { return cwp_landmarks_json(c.p, c.q, b, n, need); });
    if (c.format == "json") {
        write_json(c, text);
        return;
    }
    const auto j = nlohmann::json::parse(text);
    Output o(c.out);
    o.os() << "p,q,beta_c,beta_tilde,h_tilde,s_pq,type\n"
           << c.p << ',' << c.q << ',' << num(j["beta_c"]) << ',' << num(j["beta_tilde"]) << ',' << num(j["h_tilde"])
           << ',' << num(j["s_pq"]) << ',' << j["type"].get<std::string>() << '\n';
}

void cmd_phase_diagram(const Config& c)
{
    cwp_landmarks lm{};
    check(cwp_landmarks_get(c.p, c.q, &lm));
    std::vector<double> br = c.beta_range, hr = c.h_range;
    if (br.empty())
        br = {0.0, 1.5 * lm.beta_c};
    if (hr.empty())
        hr = {0.0, 1.5 * std::max(lm.h_tilde, 0.5)};
    DiagramHandle d;
    check(cwp_diagram_create(c.p, c.q, br[0], br[1], hr[0], hr[1], c.resolution, c.resolution, &d.ptr));
    std::vector<int> tags(static_cast<std::size_t>(c.resolution) * static_cast<std::size_t>(c.resolution));
    check(cwp_diagram_tags(d.ptr, tags.data(), tags.size()));
    const std::string meta =
        fetch_json([&](char* b, std::size_t n, std::size_t* need) { return cwp_diagram_json(d.ptr, b, n, need); });

    if (c.format == "json") {
        auto j = nlohmann::json::parse(meta);
        nlohmann::json grid = nlohmann::json::array();
        for (int ih = 0; ih < c.resolution; ++ih)
            for (int ib = 0; ib < c.resolution; ++ib) {
                double beta = 0, h = 0;
                check(cwp_diagram_cell(d.ptr, ib, ih, &beta, &h));
                grid.push_back({{"beta", beta}, {"h", h}, {"tag", tag_label(tags[static_cast<std::size_t>(ih * c.resolution + ib)])}});
            }
        j["grid"] = grid;
        write_json(c, j.dump());
        return;
    }
    Output o(c.out);
    o.os() << "beta,h,tag\n";
    for (int ih = 0; ih < c.resolution; ++ih)
        for (int ib = 0; ib < c.resolution; ++ib) {
            double beta = 0, h = 0;
            check(cwp_diagram_cell(d.ptr, ib, ih, &beta, &h));
            o.os() << num(beta) << ',' << num(h) << ',' << tag_label(tags[static_cast<std::size_t>(ih * c.resolution + ib)]) << '\n';
        }
    if (!c.landmarks_out.empty()) {
        Output side(c.landmarks_out);
        side.os() << meta << '\n';
    }
}

void cmd_curve(const Config& c)
{
    std::size_t count = 0;
    const auto n = static_cast<std::size_t>(c.resolution);
    std::vector<double> h(n), beta(n), lo(n), hi(n);
    check(cwp_critical_curve(c.p, c.q, c.resolution, h.data(), beta.data(), lo.data(), hi.data(), n, &count));
    if (c.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t i = 0; i < count; ++i)
            arr.push_back({{"h", h[i]}, {"beta", beta[i]}, {"s_low", lo[i]}, {"s_high", hi[i]}});
        write_json(c, nlohmann::json{{"p", c.p}, {"q", c.q}, {"curve", arr}}.dump());
        return;
    }
    Output o(c.out);
    o.os() << "h,beta,s_low,s_high\n";
    for (std::size_t i = 0; i < count; ++i)
        o.os() << num(h[i]) << ',' << num(beta[i]) << ',' << num(lo[i]) << ',' << num(hi[i]) << '\n';
}

void cmd_exact(const Config& c)
{
    const cwp_spec s = c.spec();
    double logz = 0, u1 = 0, up = 0;
    check(cwp_exact_moments(&s, c.N, &logz, &u1, &up));
    ExactHandle law;
    check(cwp_exact_law_create(&s, c.N, &law.ptr));
    std::vector<double> marg(static_cast<std::size_t>(c.N) + 1);
    check(cwp_exact_law_marginal_first(law.ptr, marg.data(), marg.size()));
    if (!c.dump.empty())
        check(cwp_exact_law_save(law.ptr, c.dump.c_str()));
    if (c.format == "json") {
        write_json(c, nlohmann::json{{"spec", {{"p", c.p}, {"q", c.q}, {"beta", c.beta}, {"h", c.h}}},
                                     {"N", c.N},
                                     {"log_partition", logz},
                                     {"u_N1", u1},
                                     {"u_Np", up},
                                     {"support_size", cwp_exact_law_size(law.ptr)},
                                     {"marginal_first", marg}}
                              .dump());
        return;
    }
    Output o(c.out);
    o.os() << "k,x1,probability,u_N1,u_Np\n";
    for (std::size_t k = 0; k < marg.size(); ++k)
        o.os() << k << ',' << num(static_cast<double>(k) / c.N) << ',' << num(marg[k]) << ',' << num(u1) << ','
               << num(up) << '\n';
}

std::vector<double> draw(const Config& c, const cwp_spec& s)
{
    if (c.method == "exact")
        return draw_exact(s, c.N, c.samples, c.seed);
    std::size_t count = 0;
    const std::size_t cap = static_cast<std::size_t>(c.sweeps) * static_cast<std::size_t>(c.q);
    std::vector<double> xs(cap);
    check(cwp_gibbs_chain(&s, c.N, c.sweeps, c.burn_in, c.thin, c.seed, xs.data(), xs.size(), &count));
    xs.resize(count * static_cast<std::size_t>(c.q));
    return xs;
}

void cmd_simulate(const Config& c)
{
    const cwp_spec req = c.spec();
    cwp_tag tag{};
    cwp_spec s{};
    check(cwp_classify(&req, &tag, &s));
    const auto xs = draw(c, s);
    const std::size_t q = static_cast<std::size_t>(c.q), n = xs.size() / q;
    std::vector<double> w(xs.size()), t(n);
    std::vector<std::size_t> basin(n);
    double exponent = 0.5;
    check(cwp_rescale(&s, c.N, xs.data(), n, w.data(), t.data(), basin.data(), &exponent));
    const auto dir = default_direction(c);

    Output o(c.out);
    o.os() << "index";
    for (std::size_t r = 0; r < q; ++r)
        o.os() << ",x" << r + 1;
    for (std::size_t r = 0; r < q; ++r)
        o.os() << ",w" << r + 1;
    o.os() << ",t,projection,basin\n";
    for (std::size_t i = 0; i < n; ++i) {
        double proj = 0.0;
        o.os() << i;
        for (std::size_t r = 0; r < q; ++r)
            o.os() << ',' << num(xs[i * q + r]);
        for (std::size_t r = 0; r < q; ++r) {
            o.os() << ',' << num(w[i * q + r]);
            proj += w[i * q + r] * dir[r];
        }
        o.os() << ',' << num(t[i]) << ',' << num(proj) << ',' << basin[i] << '\n';
    }

    if (!c.density_out.empty()) {
        LawHandle law;
        if (tag == CWP_SPECIAL_TYPE_I || tag == CWP_SPECIAL_TYPE_II)
            check(cwp_law_create(&s, CWP_LAW_T, 0.0, 0.0, &law.ptr));
        else
            check(cwp_law_projection(&s, dir.data(), q, &law.ptr));
        std::vector<double> rows(3 * static_cast<std::size_t>(c.density_points));
        check(cwp_law_density_table(law.ptr, c.density_points, rows.data(), rows.size()));
        Output d(c.density_out);
        d.os() << "x,pdf,cdf\n";
        for (int i = 0; i < c.density_points; ++i)
            d.os() << num(rows[3 * i]) << ',' << num(rows[3 * i + 1]) << ',' << num(rows[3 * i + 2]) << '\n';
    }
}

std::vector<double> observed_data(const Config& c, const cwp_spec& s)
{
    if (c.simulate == !c.data.empty())
        throw CallFailed{CWP_ERR_INVALID_ARGUMENT, "give exactly one of --data and --simulate"};
    if (c.simulate)
        return draw_exact(s, c.N, 1, c.seed);
    std::ifstream in(c.data);
    if (!in)
        throw CallFailed{CWP_ERR_IO, "cannot read " + c.data};
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    for (char& ch : text)
        if (ch == ',' || ch == ';')
            ch = ' ';
    std::istringstream ss(text);
    std::vector<double> xs;
    for (double v; ss >> v;)
        xs.push_back(v);
    if (static_cast<int>(xs.size()) != c.q)
        throw CallFailed{CWP_ERR_SHAPE, "data file must hold q proportions"};
    return xs;
}

cwp_axis axis_of(const Config& c) { return c.axis == "h" ? CWP_AXIS_H : CWP_AXIS_BETA; }

cwp_ci_method method_of(const Config& c)
{
    if (c.ci_method == "augmented")
        return CWP_CI_AUGMENTED;
    if (c.ci_method == "two_step")
        return CWP_CI_TWO_STEP;
    return CWP_CI_PLAIN;
}

void cmd_estimate(const Config& c, bool ci_only)
{
    const cwp_spec s = c.spec();
    const auto x = observed_data(c, s);
    if (ci_only && c.estimate) {
        cwp_interval iv{};
        check(cwp_confidence_set(&s, axis_of(c), method_of(c), *c.estimate, x.data(), x.size(), c.N, c.alpha, &iv));
        static const char* methods[] = {"plain", "augmented", "two_step"};
        nlohmann::json j = {{"lower", iv.lower},
                            {"upper", iv.upper},
                            {"appended", iv.has_appended ? nlohmann::json::array({iv.appended}) : nlohmann::json::array()},
                            {"method", methods[iv.method]},
                            {"level", iv.level}};
        if (iv.has_p_value)
            j["p_value"] = iv.p_value;
        write_json(c, j.dump());
        return;
    }
    const std::string text = fetch_json([&](char* b, std::size_t n, std::size_t* need) {
        return cwp_estimate_json(&s, axis_of(c), method_of(c), x.data(), x.size(), c.N, c.alpha, b, n, need);
    });
    if (!ci_only) {
        auto j = nlohmann::json::parse(text);
        j["data"] = x;
        write_json(c, j.dump());
        return;
    }
    write_json(c, nlohmann::json::parse(text)["ci"].dump());
}

void cmd_limit_check(const Config& c)
{
    const cwp_spec req = c.spec();
    cwp_tag tag{};
    cwp_spec s{};
    check(cwp_classify(&req, &tag, &s));
    const auto xs = draw_exact(s, c.N, c.samples, c.seed);
    const std::size_t q = static_cast<std::size_t>(c.q), n = c.samples;
    std::vector<double> w(xs.size()), t(n);
    check(cwp_rescale(&s, c.N, xs.data(), n, w.data(), t.data(), nullptr, nullptr));
    LawHandle law;
    std::vector<double> stat;
    std::string statistic;
    if (tag == CWP_SPECIAL_TYPE_I || tag == CWP_SPECIAL_TYPE_II) {
        check(cwp_law_create(&s, CWP_LAW_T, 0.0, 0.0, &law.ptr));
        stat = t;
        statistic = "t";
    } else {
        const auto dir = default_direction(c);
        check(cwp_law_projection(&s, dir.data(), q, &law.ptr));
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t r = 0; r < q; ++r)
                acc += w[i * q + r] * dir[r];
            stat.push_back(acc);
        }
        statistic = "projection";
    }
    double ks = 0.0;
    check(cwp_ks_distance(law.ptr, stat.data(), stat.size(), &ks));
    const std::string law_text =
        fetch_json([&](char* b, std::size_t m, std::size_t* need) { return cwp_law_json(law.ptr, b, m, need); });
    write_json(c, nlohmann::json{{"tag", tag_label(tag)},
                                 {"effective", {{"p", s.p}, {"q", s.q}, {"beta", s.beta}, {"h", s.h}}},
                                 {"N", c.N},
                                 {"samples", c.samples},
                                 {"seed", c.seed},
                                 {"statistic", statistic},
                                 {"ks_distance", ks},
                                 {"tolerance", c.tolerance},
                                 {"pass", ks <= c.tolerance},
                                 {"law", nlohmann::json::parse(law_text)}}
                      .dump());
}

void add_spec(CLI::App* cmd, Config& c, bool with_beta, bool with_h)
{
    cmd->set_help_flag("--help", "print help");
    cmd->add_option("--p", c.p, "interaction order p >= 2")->required();
    cmd->add_option("--q", c.q, "number of colors q >= 2")->required();
    if (with_beta)
        cmd->add_option("--beta", c.beta, "inverse temperature");
    if (with_h)
        cmd->add_option("--h", c.h, "external field on color 1");
}

void add_output(CLI::App* cmd, Config& c)
{
    cmd->add_option("--out", c.out, "output path, - for stdout");
    cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Curie-Weiss Potts phase structure, exact laws, limit laws and estimation"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    Config c;

    auto* classify = app.add_subcommand("classify", "classify (beta, h); JSON point class");
    add_spec(classify, c, true, true);
    add_output(classify, c);

    auto* landmarks = app.add_subcommand("landmarks", "beta_c and the special point; CSV p,q,beta_c,beta_tilde,h_tilde,s_pq,type");
    add_spec(landmarks, c, false, false);
    add_output(landmarks, c);

    auto* diagram = app.add_subcommand("phase-diagram", "tag grid at cell centers; CSV beta,h,tag");
    add_spec(diagram, c, false, false);
    add_output(diagram, c);
    diagram->add_option("--resolution", c.resolution, "cells per axis")->check(CLI::PositiveNumber);
    diagram->add_option("--beta-range", c.beta_range, "beta lo hi")->expected(2);
    diagram->add_option("--h-range", c.h_range, "h lo hi")->expected(2);
    diagram->add_option("--landmarks-out", c.landmarks_out, "JSON file for landmarks and curve");

    auto* curve = app.add_subcommand("curve", "critical curve samples; CSV h,beta,s_low,s_high");
    add_spec(curve, c, false, false);
    add_output(curve, c);
    curve->add_option("--resolution", c.resolution, "number of samples")->check(CLI::PositiveNumber);

    auto* exact = app.add_subcommand("exact", "exact law of c_1; CSV k,x1,probability,u_N1,u_Np");
    add_spec(exact, c, true, true);
    add_output(exact, c);
    exact->add_option("--N", c.N, "number of sites")->check(CLI::PositiveNumber);
    exact->add_option("--dump", c.dump, "binary dump of the full composition law");

    auto* simulate = app.add_subcommand(
        "simulate", "rescaled draws; CSV index,x1..xq,w1..wq,t,projection,basin (density CSV x,pdf,cdf)");
    add_spec(simulate, c, true, true);
    simulate->add_option("--out", c.out, "output path, - for stdout");
    simulate->add_option("--N", c.N, "number of sites")->check(CLI::PositiveNumber);
    simulate->add_option("--samples", c.samples, "number of exact draws");
    simulate->add_option("--seed", c.seed, "random seed");
    simulate->add_option("--method", c.method, "exact or gibbs")->check(CLI::IsMember({"exact", "gibbs"}));
    simulate->add_option("--sweeps", c.sweeps, "Gibbs sweeps");
    simulate->add_option("--burn-in", c.burn_in, "Gibbs burn-in sweeps");
    simulate->add_option("--thin", c.thin, "Gibbs thinning");
    simulate->add_option("--direction", c.direction, "projection direction, q entries")->delimiter(',');
    simulate->add_option("--density", c.density_out, "CSV file for the limiting density");
    simulate->add_option("--resolution", c.density_points, "density table points");

    auto setup_estimate = [&](CLI::App* cmd) {
        add_spec(cmd, c, true, true);
        cmd->add_option("--out", c.out, "output path, - for stdout");
        cmd->add_option("--N", c.N, "number of sites")->check(CLI::PositiveNumber);
        cmd->add_option("--axis", c.axis, "parameter to estimate: h or beta")->check(CLI::IsMember({"h", "beta"}));
        cmd->add_option("--data", c.data, "file with q observed proportions");
        cmd->add_flag("--simulate", c.simulate, "draw the data from the exact law at (beta, h)");
        cmd->add_option("--seed", c.seed, "random seed for --simulate");
        cmd->add_option("--alpha", c.alpha, "one minus the confidence level");
        cmd->add_option("--method", c.ci_method, "plain, augmented or two_step")
            ->check(CLI::IsMember({"plain", "augmented", "two_step"}));
    };
    auto* estimate = app.add_subcommand("estimate", "moment-equation estimate and confidence set; JSON");
    setup_estimate(estimate);
    auto* ci = app.add_subcommand("ci", "confidence set only; JSON");
    setup_estimate(ci);
    ci->add_option("--estimate", c.estimate, "use this estimate instead of solving for it");

    auto* check_cmd = app.add_subcommand("limit-check", "KS distance of rescaled exact draws to the limit law; JSON");
    add_spec(check_cmd, c, true, true);
    check_cmd->add_option("--out", c.out, "output path, - for stdout");
    check_cmd->add_option("--N", c.N, "number of sites")->check(CLI::PositiveNumber);
    check_cmd->add_option("--samples", c.samples, "number of exact draws");
    check_cmd->add_option("--seed", c.seed, "random seed");
    check_cmd->add_option("--tolerance", c.tolerance, "KS pass threshold");
    check_cmd->add_option("--direction", c.direction, "projection direction, q entries")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*classify)
            cmd_classify(c);
        else if (*landmarks)
            cmd_landmarks(c);
        else if (*diagram)
            cmd_phase_diagram(c);
        else if (*curve)
            cmd_curve(c);
        else if (*exact)
            cmd_exact(c);
        else if (*simulate)
            cmd_simulate(c);
        else if (*estimate)
            cmd_estimate(c, false);
        else if (*ci)
            cmd_estimate(c, true);
        else if (*check_cmd)
            cmd_limit_check(c);
    } catch (const CallFailed& e) {
        std::cerr << "error: " << e.message << '\n';
        return exit_code(e.status);
    }
    return 0;
}
