// lvmrs — batch certification of randomized-smoothing classifiers.
//
// Subcommands:
//   certify  certificates from a score file or a built-in model
//   bounds   closed-form smoothed-Lipschitz bounds and the optimal sigma
//   curve    certified-accuracy curve from a certificate file
//
// Exit codes: 0 success, 2 usage/config, 3 data format,
// 4 numerical-consistency failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <CLI11.hpp>

#include "lvmrs/certificate_io.hpp"
#include "lvmrs/engine.hpp"
#include "lvmrs/lipschitz_bounds.hpp"
#include "lvmrs/models.hpp"
#include "lvmrs/score_io.hpp"

namespace {

using namespace lvmrs;

constexpr int kExitUsage = 2;
constexpr int kExitDataFormat = 3;
constexpr int kExitNumericalConsistency = 4;

struct CertifyOptions {
  std::string scores_path;
  std::string model_name;
  std::string inputs_path;
  std::string labels_path;
  std::string out_path;
  double sigma = 0.0;
  bool sigma_set = false;
  double alpha = 1e-3;
  std::size_t n0 = 1000;
  std::size_t n = 10000;
  bool n_set = false;
  std::string maps = "sparsemax,softmax,hardmax";
  double t_lower = 0.01;
  double t_upper = 50.0;
  std::size_t t_count = 50;
  std::string t_scale = "log";
  double mass = 1.0;
  std::string method = "bernstein";
  std::string risk_split = "paper-literal";
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  // built-in model parameters
  double model_l = 1.0;
  double model_r = 1.0;
  std::size_t model_dim = 2;
  std::size_t model_classes = 3;
  std::uint64_t model_weight_seed = 12345;
  double model_scale = 1.0;
};

std::vector<simplex::MapKind> parse_maps(const std::string& csv) {
  std::vector<simplex::MapKind> kinds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) kinds.push_back(simplex::map_kind_from_name(item));
  }
  if (kinds.empty()) throw std::invalid_argument("--maps: empty list");
  return kinds;
}

std::vector<std::vector<double>> read_inputs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open inputs file " + path);
  std::vector<std::vector<double>> inputs;
  std::string line;
  while (std::getline(in, line)) {
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::stringstream ss(line);
    std::vector<double> x;
    double v = 0.0;
    while (ss >> v) x.push_back(v);
    if (!x.empty()) inputs.push_back(std::move(x));
  }
  if (inputs.empty())
    throw std::invalid_argument("inputs file " + path + " has no rows");
  return inputs;
}

std::unordered_map<std::uint32_t, int> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open labels file " + path);
  std::unordered_map<std::uint32_t, int> labels;
  std::string line;
  std::uint32_t implicit_id = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    long long a = 0, b = 0;
    if (!(ss >> a)) continue;
    if (ss >> b) {
      labels[static_cast<std::uint32_t>(a)] = static_cast<int>(b);
    } else {
      labels[implicit_id++] = static_cast<int>(a);
    }
  }
  if (labels.empty())
    throw std::invalid_argument("labels file " + path + " has no entries");
  return labels;
}

std::unique_ptr<models::ScoreModel> make_model(const CertifyOptions& opt) {
  if (opt.model_name == "threshold_1d")
    return std::make_unique<models::ThresholdModel>();
  if (opt.model_name == "worst_case_hbar")
    return std::make_unique<models::WorstCaseModel>(opt.model_dim, opt.model_l,
                                                    opt.model_r);
  if (opt.model_name == "linear_multiclass")
    return std::make_unique<models::LinearModel>(models::LinearModel::random(
        opt.model_classes, opt.model_dim, opt.model_weight_seed,
        opt.model_scale));
  throw std::invalid_argument("unknown model '" + opt.model_name +
                              "' (threshold_1d | worst_case_hbar | "
                              "linear_multiclass)");
}

engine::GridConfig make_grid_config(const CertifyOptions& opt) {
  engine::GridConfig config;
  config.map_kinds = parse_maps(opt.maps);
  if (opt.t_scale != "log" && opt.t_scale != "linear")
    throw std::invalid_argument("--t-scale must be log or linear");
  config.temperatures = engine::temperature_grid(
      opt.t_lower, opt.t_upper, opt.t_count, opt.t_scale == "log");
  config.mass = opt.mass;
  config.n0 = opt.n0;
  config.n = opt.n;
  config.alpha = opt.alpha;
  config.sigma = opt.sigma;
  config.seed = opt.seed;
  config.method = concentration::method_from_name(opt.method);
  if (opt.risk_split == "paper-literal") {
    config.risk_split = concentration::RiskSplit::paper_literal;
  } else if (opt.risk_split == "bonferroni") {
    config.risk_split = concentration::RiskSplit::bonferroni;
  } else {
    throw std::invalid_argument("--risk-split must be paper-literal or "
                                "bonferroni");
  }
  return config;
}

void emit_records(const std::string& out_path,
                  const std::vector<io::CertificateRecord>& records) {
  if (out_path.empty()) {
    std::cout << io::kCertificateCsvHeader << "\n";
    for (const auto& record : records)
      std::cout << io::format_record(record) << "\n";
  } else {
    io::write_records(out_path, records);
  }
}

// Runs fn(i) for i in [0, count) on `jobs` threads; results land in order.
void parallel_for(std::size_t count, unsigned jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned workers = std::min<unsigned>(jobs, count);
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

int run_certify(const CertifyOptions& opt) {
  const bool scores_mode = !opt.scores_path.empty();
  if (scores_mode == !opt.model_name.empty())
    throw std::invalid_argument("pass exactly one of --scores or --model");

  std::unordered_map<std::uint32_t, int> labels;
  if (!opt.labels_path.empty()) labels = read_labels(opt.labels_path);

  std::vector<io::CertificateRecord> records;

  if (scores_mode) {
    io::ScoreFile file = io::read_score_file(opt.scores_path);
    double sigma = 0.0;
    if (file.header.sigma) {
      sigma = *file.header.sigma;
      if (opt.sigma_set && opt.sigma != sigma)
        throw std::invalid_argument(
            "score file declares sigma=" + std::to_string(sigma) +
            "; conflicting --sigma is an error");
    } else {
      if (!opt.sigma_set)
        throw std::invalid_argument("CSV score files carry no sigma; pass "
                                    "--sigma");
      sigma = opt.sigma;
    }
    const std::size_t file_n = file.header.samples_per_input;
    if (opt.n0 + 2 > file_n)
      throw std::invalid_argument(
          "--n0 leaves fewer than 2 certification rows (file has " +
          std::to_string(file_n) + " samples per input)");
    const std::size_t cert_rows = file_n - opt.n0;
    if (opt.n_set && opt.n != cert_rows)
      throw std::invalid_argument(
          "--n conflicts with the score file split: file provides " +
          std::to_string(cert_rows) + " certification rows after --n0");

    CertifyOptions derived = opt;
    derived.sigma = sigma;
    derived.n = cert_rows;
    engine::GridConfig config = make_grid_config(derived);

    records.resize(file.blocks.size());
    parallel_for(file.blocks.size(), opt.jobs, [&](std::size_t b) {
      const auto& block = file.blocks[b];
      const std::size_t c = block.cols;
      engine::ScoreMatrix validation{
          opt.n0, c,
          {block.data.begin(),
           block.data.begin() + static_cast<std::ptrdiff_t>(opt.n0 * c)}};
      engine::ScoreMatrix certification{
          cert_rows, c,
          {block.data.begin() + static_cast<std::ptrdiff_t>(opt.n0 * c),
           block.data.end()}};
      io::CertificateRecord record;
      record.input_id = static_cast<std::uint32_t>(b);
      record.seed = opt.seed;
      record.cert = engine::lvm_rs_certify_from_scores(validation,
                                                       certification, config);
      const auto label = labels.find(record.input_id);
      if (label != labels.end()) record.label = label->second;
      records[b] = std::move(record);
    });
  } else {
    if (!opt.sigma_set)
      throw std::invalid_argument("--sigma is required with --model");
    const auto model = make_model(opt);
    engine::GridConfig config = make_grid_config(opt);

    std::vector<std::vector<double>> inputs;
    if (!opt.inputs_path.empty()) {
      inputs = read_inputs(opt.inputs_path);
      for (const auto& x : inputs) {
        if (x.size() != model->input_dim())
          throw std::invalid_argument(
              "inputs file row has dimension " + std::to_string(x.size()) +
              ", model expects " + std::to_string(model->input_dim()));
      }
    } else {
      inputs.emplace_back(model->input_dim(), 0.0);
    }

    records.resize(inputs.size());
    parallel_for(inputs.size(), opt.jobs, [&](std::size_t i) {
      io::CertificateRecord record;
      record.input_id = static_cast<std::uint32_t>(i);
      record.seed = opt.seed;
      record.cert = engine::lvm_rs_certify(*model, inputs[i],
                                           record.input_id, config);
      const auto label = labels.find(record.input_id);
      if (label != labels.end()) record.label = label->second;
      records[i] = std::move(record);
    });
  }

  emit_records(opt.out_path, records);
  return 0;
}

struct BoundsOptions {
  double lipschitz = 0.0;
  double mass = 1.0;
  double sigma = 0.0;
  bool sigma_set = false;
  bool optimal = false;
  std::string which = "elementwise";
};

int run_bounds(const BoundsOptions& opt) {
  if (opt.which != "elementwise" && opt.which != "vector")
    throw std::invalid_argument("--case must be elementwise or vector");
  if (opt.sigma_set == opt.optimal)
    throw std::invalid_argument("pass exactly one of --sigma or --optimal");
  const bool elementwise = opt.which == "elementwise";
  const auto which = elementwise ? bounds::Case::elementwise
                                 : bounds::Case::vector;
  const double sigma_star =
      bounds::optimal_sigma(opt.lipschitz, opt.mass, which);
  const double sigma = opt.optimal ? sigma_star : opt.sigma;
  const bounds::BoundInputs in{opt.lipschitz, sigma, opt.mass};
  const double bound = elementwise ? bounds::smoothed_lipschitz_elementwise(in)
                                   : bounds::smoothed_lipschitz_vector(in);
  const double min_noise = elementwise
                               ? opt.mass / std::sqrt(2.0 * M_PI * sigma * sigma)
                               : opt.mass / std::sqrt(M_PI * sigma * sigma);

  std::printf("case              : %s\n", opt.which.c_str());
  std::printf("base lipschitz L  : %.17g\n", opt.lipschitz);
  std::printf("mass r            : %.17g\n", opt.mass);
  std::printf("sigma             : %.17g\n", sigma);
  std::printf("erf bound         : %.17g\n", bound);
  std::printf("bound / L         : %.17g\n", bound / opt.lipschitz);
  std::printf("min-form noise    : %.17g\n", min_noise);
  std::printf("min-form base     : %.17g\n", opt.lipschitz);
  std::printf("sigma*            : %.17g\n", sigma_star);
  return 0;
}

struct CurveOptions {
  std::string certificates_path;
  std::string labels_path;
  std::string eps;
  std::string out_path;
};

int run_curve(const CurveOptions& opt) {
  const auto records = io::read_records(opt.certificates_path);
  const auto labels_by_id = read_labels(opt.labels_path);

  std::vector<radius::Certificate> certs;
  std::vector<int> labels;
  certs.reserve(records.size());
  for (const auto& record : records) {
    const auto it = labels_by_id.find(record.input_id);
    if (it == labels_by_id.end())
      throw std::invalid_argument("missing label for input " +
                                  std::to_string(record.input_id));
    certs.push_back(record.cert);
    labels.push_back(it->second);
  }

  std::vector<double> eps_grid;
  std::stringstream ss(opt.eps);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) eps_grid.push_back(std::stod(item));
  }
  if (eps_grid.empty()) throw std::invalid_argument("--eps: empty list");

  const auto curve = engine::certified_accuracy_curve(certs, labels, eps_grid);
  std::ostringstream out;
  out << "eps,certified_accuracy\n";
  char buf[64];
  for (const auto& point : curve) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", point.eps,
                  point.certified_accuracy);
    out << buf;
  }
  if (opt.out_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream file(opt.out_path, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + opt.out_path);
    file << out.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"risk-corrected certified radii for randomized smoothing"};
  app.require_subcommand(1);

  CertifyOptions copt;
  CLI::App* certify = app.add_subcommand(
      "certify", "certify a batch of inputs from scores or a built-in model");
  certify->add_option("--scores", copt.scores_path,
                      "score file (binary LVMS1 or CSV)");
  certify->add_option("--model", copt.model_name,
                      "built-in model: threshold_1d | worst_case_hbar | "
                      "linear_multiclass");
  certify->add_option("--inputs", copt.inputs_path,
                      "inputs file for --model (one vector per line)");
  certify->add_option("--labels", copt.labels_path,
                      "labels file: 'input_id label' or one label per line");
  auto* sigma_opt =
      certify->add_option("--sigma", copt.sigma, "smoothing noise level");
  certify->add_option("--alpha", copt.alpha, "risk level (default 1e-3)");
  certify->add_option("--n0", copt.n0, "validation sample count");
  auto* n_opt =
      certify->add_option("--n", copt.n, "certification sample count");
  certify->add_option("--maps", copt.maps, "comma list of simplex maps");
  certify->add_option("--t-lower", copt.t_lower, "lowest temperature");
  certify->add_option("--t-upper", copt.t_upper, "highest temperature");
  certify->add_option("--t-count", copt.t_count, "temperature grid size");
  certify->add_option("--t-scale", copt.t_scale, "log | linear");
  certify->add_option("--mass", copt.mass, "simplex mass r");
  certify->add_option("--method", copt.method,
                      "bernstein | hoeffding | clopper-pearson");
  certify->add_option("--risk-split", copt.risk_split,
                      "paper-literal | bonferroni");
  certify->add_option("--seed", copt.seed, "64-bit RNG seed");
  certify->add_option("--out", copt.out_path, "output CSV (default stdout)");
  certify->add_option("--jobs", copt.jobs, "parallel inputs (default 1)");
  certify->add_option("--model-l", copt.model_l, "worst_case_hbar L");
  certify->add_option("--model-r", copt.model_r, "worst_case_hbar mass");
  certify->add_option("--model-dim", copt.model_dim, "model input dimension");
  certify->add_option("--model-classes", copt.model_classes,
                      "linear model classes");
  certify->add_option("--model-weight-seed", copt.model_weight_seed,
                      "linear model parameter seed");
  certify->add_option("--model-scale", copt.model_scale,
                      "linear model weight scale");

  BoundsOptions bopt;
  CLI::App* bounds_cmd = app.add_subcommand(
      "bounds", "print the smoothed-classifier Lipschitz bounds");
  bounds_cmd->add_option("--lipschitz", bopt.lipschitz, "base constant L")
      ->required();
  bounds_cmd->add_option("--mass", bopt.mass, "simplex mass r");
  auto* bsigma = bounds_cmd->add_option("--sigma", bopt.sigma, "noise level");
  bounds_cmd->add_flag("--optimal", bopt.optimal, "evaluate at sigma*");
  bounds_cmd->add_option("--case", bopt.which, "elementwise | vector");

  CurveOptions uopt;
  CLI::App* curve = app.add_subcommand(
      "curve", "certified-accuracy curve from certificates and labels");
  curve->add_option("--certificates", uopt.certificates_path)->required();
  curve->add_option("--labels", uopt.labels_path)->required();
  curve->add_option("--eps", uopt.eps, "comma list of perturbation levels")
      ->required();
  curve->add_option("--out", uopt.out_path, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  copt.sigma_set = sigma_opt->count() > 0;
  copt.n_set = n_opt->count() > 0;
  bopt.sigma_set = bsigma->count() > 0;

  try {
    if (certify->parsed()) return run_certify(copt);
    if (bounds_cmd->parsed()) return run_bounds(bopt);
    if (curve->parsed()) return run_curve(uopt);
    return kExitUsage;
  } catch (const io::ScoreFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataFormat;
  } catch (const models::NumericalConsistencyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalConsistency;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
