#include "hsd/cli/commands.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "hsd/cli/config.hpp"
#include "hsd/cli/manifest.hpp"
#include "hsd/cli/run_record.hpp"
#include "hsd/color/cmf.hpp"
#include "hsd/color/srgb.hpp"
#include "hsd/core/sampling.hpp"
#include "hsd/data/synthetic.hpp"
#include "hsd/errors.hpp"
#include "hsd/eval/benchmark.hpp"
#include "hsd/eval/boxplot.hpp"
#include "hsd/eval/frechet.hpp"
#include "hsd/eval/plugins.hpp"
#include "hsd/io/containers.hpp"
#include "hsd/io/netpbm.hpp"
#include "hsd/nn/inference.hpp"
#include "hsd/nn/losses.hpp"
#include "hsd/pref/bradley_terry.hpp"
#include "hsd/train/training.hpp"

namespace hsd::cli {
namespace fs = std::filesystem;

namespace {

struct KeyDef {
  std::string key;
  std::string def;
  std::string help;
};

class Context;

struct Command {
  std::string name;
  std::string help;
  std::vector<KeyDef> keys;
  std::string positional;  // key bound to the positional argument, if any
  bool train_keys = false;
  std::function<void(Context&)> run;
};

class Context {
 public:
  Context(KeyValues kv, fs::path out, std::ostream& log) : kv_(std::move(kv)), out_(std::move(out)), log_(log) {}

  const KeyValues& values() const { return kv_; }
  std::ostream& log() { return log_; }
  RunRecord& record() { return rec_; }
  const fs::path& out_dir() const { return out_; }

  const std::string& get(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing key '" + key + "'");
    return it->second;
  }

  const std::string& required(const std::string& key) const {
    const auto& v = get(key);
    if (v.empty()) throw UsageError("--" + key + " is required");
    return v;
  }

  std::int64_t integer(const std::string& key) const {
    const auto& s = get(key);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("--" + key + " expects an integer");
    return v;
  }

  double real(const std::string& key) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(get(key), &used);
      if (used == get(key).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("--" + key + " expects a number");
  }

  /// Resolves an input path and records its digest.
  fs::path input(const std::string& key) { return track(resolve_input(required(key))); }

  fs::path track(const fs::path& p) {
    if (!fs::exists(p)) throw IoError("input not found: " + p.string());
    if (fs::is_regular_file(p)) rec_.inputs.push_back(digest_file(p));
    return p;
  }

  void track_all(const std::vector<fs::path>& files) {
    for (const auto& f : files) track(f);
  }

  fs::path write(const std::string& name, const io::Bytes& bytes) {
    const auto p = out_ / name;
    io::write_file_atomic(p, bytes);
    rec_.outputs.push_back(digest_file(p));
    return p;
  }

  fs::path write(const std::string& name, const std::string& text) {
    return write(name, io::Bytes(text.begin(), text.end()));
  }

  train::TrainConfig train_config() const {
    train::TrainConfig cfg;
    for (const auto& [key, _] : train::to_key_values(cfg)) {
      if (auto it = kv_.find(key); it != kv_.end()) train::set_key(cfg, key, it->second);
    }
    cfg.validate();
    return cfg;
  }

  ColorMatchingTable cmf() {
    const auto& path = get("cmf");
    if (path.empty()) return cie1931_2deg();
    return load_cmf_table(input("cmf"));
  }

  std::vector<double> band_centers(std::size_t bands) const {
    return linspace_band_centers(bands, real("first_nm"), real("last_nm"));
  }

 private:
  KeyValues kv_;
  fs::path out_;
  std::ostream& log_;
  RunRecord rec_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string stem_of(const fs::path& p) { return p.stem().string(); }

train::Models load_models(Context& ctx, const train::TrainConfig& cfg, bool required) {
  auto models = train::make_models(cfg);
  if (ctx.get("checkpoint").empty()) {
    if (required) throw UsageError("--checkpoint is required");
    return models;
  }
  auto ckpt = train::load_checkpoint(ctx.input("checkpoint"));
  train::require_compatible(ckpt, cfg);
  train::restore(ckpt, models);
  ctx.record().metadata["checkpoint_step"] = ckpt.step;
  return models;
}

std::optional<MsfaPattern> pattern_key(const Context& ctx) {
  const auto& ref = ctx.get("pattern");
  if (ref.empty()) return std::nullopt;
  return parse_pattern_ref(ref);
}

// --- subcommands --------------------------------------------------------------

void cmd_gen_synthetic(Context& ctx) {
  data::SyntheticSceneConfig sc;
  sc.height = static_cast<std::size_t>(ctx.integer("height"));
  sc.width = static_cast<std::size_t>(ctx.integer("width"));
  sc.bands = static_cast<std::size_t>(ctx.integer("bands"));
  sc.family = data::parse_scene_family(ctx.get("family"));
  sc.noise = ctx.real("noise");
  sc.first_nm = ctx.real("first_nm");
  sc.last_nm = ctx.real("last_nm");
  const auto count = ctx.integer("count");
  if (count < 1 || ctx.integer("height") < 1 || ctx.integer("width") < 1 || ctx.integer("bands") < 1) {
    throw ConfigError("count, height, width and bands must be positive");
  }
  for (std::int64_t i = 0; i < count; ++i) {
    sc.seed = ctx.record().seed + static_cast<std::uint64_t>(i);
    auto scene = data::generate_synthetic_scene(sc);
    std::ostringstream name;
    name << ctx.get("prefix") << "_" << std::setw(4) << std::setfill('0') << i << ".hsc1";
    ctx.write(name.str(), io::encode_hsc1(scene.cube));
  }
  ctx.log() << "wrote " << count << " scene(s) to " << ctx.out_dir().string() << "\n";
}

void cmd_simulate(Context& ctx) {
  const auto in = ctx.input("input");
  const auto cube = io::load_hsc1(in);
  const auto pattern = parse_pattern_ref(ctx.get("pattern"));
  const auto mosaic = simulate_mosaic(cube, pattern);
  const auto& format = ctx.get("format");
  if (format == "mos1") {
    ctx.write(stem_of(in) + ".mos1", io::encode_mos1(mosaic));
  } else if (format == "pgm") {
    ctx.write(stem_of(in) + ".pgm", io::encode_netpbm(io::netpbm_from_mosaic(mosaic)));
  } else {
    throw ConfigError("--format must be mos1 or pgm");
  }
}

void cmd_demosaic(Context& ctx) {
  const auto in = ctx.input("input");
  const auto mosaic = load_mosaic_file(in, pattern_key(ctx));
  const auto centers = ctx.band_centers(mosaic.pattern().band_count());
  const auto& method = ctx.get("method");
  Hypercube out;
  if (method == "linear") {
    out = linear_demosaic(mosaic, centers);
  } else if (method == "model") {
    const auto cfg = ctx.train_config();
    if (static_cast<std::int64_t>(mosaic.pattern().band_count()) != cfg.generator.bands ||
        static_cast<std::int64_t>(mosaic.pattern().period()) != cfg.period) {
      throw ConfigError("mosaic pattern does not match generator.bands / period");
    }
    auto models = load_models(ctx, cfg, true);
    out = nn::demosaic_with(models.demosaic, mosaic, centers);
  } else {
    throw UsageError("demosaic method must be linear or model");
  }
  ctx.write(stem_of(in) + ".hsc1", io::encode_hsc1(out));
}

void cmd_to_rgb(Context& ctx) {
  const auto in = ctx.input("input");
  auto cube = io::load_hsc1(in);
  cube = Hypercube(cube.bands(), cube.height(), cube.width(), std::move(cube.values()),
                   ctx.band_centers(cube.bands()));
  const auto& method = ctx.get("method");
  RgbImage rgb;
  if (method == "fixed") {
    rgb = fixed_hsi_to_rgb(cube, ctx.cmf());
  } else if (method == "model") {
    auto models = load_models(ctx, ctx.train_config(), true);
    rgb = nn::to_rgb_with(models.rgb, cube);
  } else {
    throw UsageError("to-rgb method must be fixed or model");
  }
  const auto bits = ctx.integer("bits");
  if (bits != 8 && bits != 16) throw ConfigError("--bits must be 8 or 16");
  ctx.write(stem_of(in) + ".ppm", io::encode_netpbm(io::netpbm_from_rgb(rgb, bits == 8 ? 255 : 65535)));
}

std::vector<SnapshotMosaic> training_mosaics(Context& ctx) {
  std::vector<fs::path> files;
  auto mosaics = load_mosaics(ctx.input("data"), ctx.get("split"), pattern_key(ctx), &files);
  ctx.track_all(files);
  return mosaics;
}

void cmd_pretrain(Context& ctx) {
  auto cfg = ctx.train_config();
  const auto mosaics = training_mosaics(ctx);
  const auto cmf = ctx.cmf();
  auto models = train::make_models(cfg);
  const auto pairs = train::build_pretrain_pairs(mosaics, cmf);
  auto& meta = ctx.record().metadata;
  auto report = [&](const char* name, const train::PretrainReport& r) {
    meta[name] = {{"steps", r.steps}, {"initial_loss", r.initial_loss}, {"final_loss", r.final_loss}};
    ctx.log() << name << ": " << fmt(r.initial_loss) << " -> " << fmt(r.final_loss) << "\n";
  };
  report("rgb", train::pretrain_rgb_converter(pairs, cfg, models.rgb));
  report("spectral", train::pretrain_spectral_recovery(pairs, cfg, models.spectral));
  train::MosaicDataset data(mosaics);
  report("demosaic", train::pretrain_demosaicker(data, cfg, models.demosaic));
  ctx.write("pretrained.hck", train::encode_checkpoint(train::capture(models, cfg, train::Phase::kPretrained, 0)));
}

void cmd_train(Context& ctx) {
  auto cfg = ctx.train_config();
  if (cfg.checkpoint_every > 0 && cfg.checkpoint_dir.empty()) {
    cfg.checkpoint_dir = (ctx.out_dir() / "checkpoints").string();
  }
  const auto mosaics = training_mosaics(ctx);
  std::vector<fs::path> corpus_files;
  const auto corpus = load_rgb_images(resolve_input(ctx.required("corpus")), &corpus_files);
  ctx.track_all(corpus_files);

  train::Checkpoint init;
  if (ctx.get("init").empty()) {
    ctx.log() << "no --init checkpoint; pre-training first\n";
    init = train::pretrain_all(mosaics, ctx.cmf(), cfg);
  } else {
    init = train::load_checkpoint(ctx.input("init"));
  }
  train::TrainHooks hooks;
  const auto every = std::max<std::int64_t>(1, cfg.joint_steps / 20);
  hooks.on_step = [&](const train::StepInfo& s) {
    if (s.step % every == 0 || s.step == cfg.joint_steps) {
      ctx.log() << "step " << s.step << " loss " << fmt(s.loss) << " d " << fmt(s.d_loss) << "\n";
    }
  };
  hooks.on_checkpoint = [&](const train::Checkpoint& c) {
    if (!cfg.checkpoint_dir.empty()) ctx.log() << "checkpoint at step " << c.step << "\n";
  };
  auto final = train::joint_finetune(train::MosaicDataset(mosaics), train::RgbCorpus(corpus), init, cfg, hooks);
  ctx.record().metadata["final_step"] = final.step;
  ctx.write("final.hck", train::encode_checkpoint(final));
}

std::vector<std::pair<std::string, Hypercube>> cubes_in(Context& ctx, const std::string& key) {
  std::vector<std::pair<std::string, Hypercube>> out;
  const auto dir = ctx.input(key);
  std::vector<fs::path> paths;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".hsc1") paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
  } else {
    paths.push_back(dir);
  }
  for (const auto& p : paths) {
    ctx.track(p);
    out.emplace_back(stem_of(p), io::load_hsc1(p));
  }
  return out;
}

void cmd_evaluate(Context& ctx) {
  const auto& method = ctx.get("method");
  std::ostringstream csv;
  csv << "method,metric,value\n";
  auto& meta = ctx.record().metadata;

  if (!ctx.get("images").empty()) {
    std::vector<fs::path> files;
    const auto images = load_rgb_images(resolve_input(ctx.get("images")), &files);
    ctx.track_all(files);
    eval::QualityRegistry scorers;
    double quality = 0.0;
    for (const auto& im : images) quality += scorers.score(im, ctx.get("scorer"));
    csv << method << ",quality_" << ctx.get("scorer") << "," << fmt(quality / images.size()) << "\n";
    meta["scorer"] = ctx.get("scorer");
    if (!ctx.get("reference").empty()) {
      std::vector<fs::path> ref_files;
      const auto refs = load_rgb_images(resolve_input(ctx.get("reference")), &ref_files);
      ctx.track_all(ref_files);
      eval::FeatureRegistry extractors;
      const auto& fx = extractors.get(ctx.get("extractor"));
      const double fd = eval::frechet_distance(eval::extract_all(fx, images), eval::extract_all(fx, refs));
      csv << method << ",frechet_" << fx.name << "," << fmt(fd) << "\n";
      meta["feature_extractor"] = {{"name", fx.name}, {"dim", fx.dim}};
    }
  }

  if (!ctx.get("cubes").empty()) {
    const auto cubes = cubes_in(ctx, "cubes");
    const auto period = ctx.integer("period");
    std::map<std::string, Hypercube> truth;
    if (!ctx.get("truth").empty())
      for (auto& [name, cube] : cubes_in(ctx, "truth")) truth.emplace(name, std::move(cube));
    double ips = 0.0, psnr = 0.0;
    std::size_t matched = 0;
    for (const auto& [name, cube] : cubes) {
      ips += ips_metric(cube, static_cast<std::size_t>(period));
      auto it = truth.find(name);
      if (it == truth.end()) continue;
      if (!it->second.same_shape(cube)) throw ShapeError("truth cube for '" + name + "' differs in shape");
      double se = 0.0;
      for (std::size_t i = 0; i < cube.values().size(); ++i) {
        const double d = static_cast<double>(cube.values()[i]) - it->second.values()[i];
        se += d * d;
      }
      psnr += 10.0 * std::log10(1.0 / std::max(se / cube.values().size(), 1e-20));
      ++matched;
    }
    csv << method << ",ips," << fmt(ips / cubes.size()) << "\n";
    if (!truth.empty()) {
      if (matched == 0) throw ConfigError("no cube names match the truth set");
      csv << method << ",psnr_db," << fmt(psnr / matched) << "\n";
    }
  }
  if (csv.str() == "method,metric,value\n") throw UsageError("evaluate needs --images and/or --cubes");
  ctx.write("metrics.csv", csv.str());
  ctx.log() << csv.str();
}

void cmd_pixel_diff(Context& ctx) {
  const auto a = io::load_hsc1(ctx.input("a"));
  const auto b = io::load_hsc1(ctx.input("b"));
  std::ostringstream csv;
  eval::write_boxplot_csv(csv, eval::pixel_diff_stats(a, b));
  ctx.write("boxplot.csv", csv.str());
}

void cmd_benchmark(Context& ctx) {
  const auto cfg = ctx.train_config();
  auto models = load_models(ctx, cfg, false);
  eval::BenchmarkOptions opts;
  opts.height = ctx.integer("height");
  opts.width = ctx.integer("width");
  opts.frames = ctx.integer("frames");
  opts.warmup = ctx.integer("warmup");
  opts.threads = ctx.integer("threads");
  opts.seed = ctx.record().seed;
  const auto pattern = MsfaPattern::row_major(static_cast<std::size_t>(cfg.period));
  const auto s = eval::benchmark_inference(models.demosaic, models.rgb, pattern, opts);
  std::ostringstream csv;
  csv << "method,metric,value\n";
  for (const auto& [name, v] : {std::pair{"mean_ms", s.mean_ms}, {"min_ms", s.min_ms}, {"max_ms", s.max_ms},
                                {"p50_ms", s.p50_ms}, {"p90_ms", s.p90_ms}, {"p99_ms", s.p99_ms}}) {
    csv << "model," << name << "," << fmt(v) << "\n";
  }
  ctx.record().metadata["frame"] = {{"height", opts.height}, {"width", opts.width}, {"frames", opts.frames}};
  ctx.write("benchmark.csv", csv.str());
  ctx.log() << csv.str();
}

void cmd_bt_fit(Context& ctx) {
  std::ifstream in(ctx.input("input"));
  const auto table = pref::parse_vote_csv(in);
  pref::BradleyTerryOptions opt;
  opt.tol = ctx.real("tol");
  opt.max_iter = static_cast<int>(ctx.integer("max_iter"));
  const auto fit = pref::fit_bradley_terry(table, opt);
  const auto p = pref::significance_test(table, fit, opt);
  std::ostringstream pis, pv;
  pis << "method,pi\n";
  pv << "method";
  for (const auto& m : table.methods) pv << "," << m;
  pv << "\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    pis << table.methods[i] << "," << fmt(fit.pi[i]) << "\n";
    pv << table.methods[i];
    for (std::size_t j = 0; j < table.size(); ++j) pv << "," << fmt(p[i][j]);
    pv << "\n";
  }
  ctx.record().metadata["significance_test"] = "likelihood ratio, chi-squared 1 df";
  ctx.record().metadata["iterations"] = fit.iterations;
  ctx.write("bt.csv", pis.str());
  ctx.write("pvalues.csv", pv.str());
  ctx.log() << pis.str() << pv.str();
}

// --- command table ------------------------------------------------------------

std::vector<Command> commands() {
  const KeyDef pattern{"pattern", "row-major-4", "MSFA pattern for PGM mosaics (row-major-<k>)"};
  const KeyDef first_nm{"first_nm", "460", "first band centre, nm"};
  const KeyDef last_nm{"last_nm", "630", "last band centre, nm"};
  const KeyDef cmf{"cmf", "", "colour matching table file (default: built-in CIE 1931 2 degree)"};
  const KeyDef checkpoint{"checkpoint", "", "checkpoint file"};
  const KeyDef data{"data", "", "manifest (.yaml), directory of mosaics or one mosaic"};
  const KeyDef split{"split", "train", "manifest split to read"};
  return {
      {"gen-synthetic",
       "Generate synthetic ground-truth cubes",
       {{"count", "1", "number of scenes"},
        {"height", "64", "scene height"},
        {"width", "64", "scene width"},
        {"bands", "16", "band count"},
        {"family", "edge-chart", "smooth | piecewise | edge-chart"},
        {"noise", "0", "Gaussian noise sigma"},
        {"prefix", "scene", "output file prefix"},
        first_nm,
        last_nm},
       "",
       false,
       cmd_gen_synthetic},
      {"simulate",
       "Sample a cube through an MSFA",
       {{"input", "", "HSC1 cube"}, {"format", "mos1", "mos1 | pgm"}, pattern},
       "",
       false,
       cmd_simulate},
      {"demosaic",
       "Demosaic a snapshot mosaic",
       {{"method", "linear", "linear | model"}, {"input", "", "MOS1 or PGM mosaic"}, pattern, checkpoint, first_nm,
        last_nm},
       "method",
       true,
       cmd_demosaic},
      {"to-rgb",
       "Convert a cube to sRGB",
       {{"method", "fixed", "fixed | model"}, {"input", "", "HSC1 cube"}, {"bits", "8", "8 | 16"}, cmf, checkpoint,
        first_nm, last_nm},
       "method",
       true,
       cmd_to_rgb},
      {"pretrain", "Pre-train all networks", {data, split, pattern, cmf}, "", true, cmd_pretrain},
      {"train",
       "Joint adversarial fine-tuning",
       {data, split, pattern, cmf, {"corpus", "", "directory of unpaired RGB .ppm images"},
        {"init", "", "pre-trained checkpoint (pre-trains when empty)"}},
       "",
       true,
       cmd_train},
      {"evaluate",
       "Quality, Frechet, IPS and PSNR metrics",
       {{"method", "model", "method label in the report"},
        {"images", "", "directory of RGB results"},
        {"reference", "", "directory of reference RGB images"},
        {"extractor", "identity-pool", "feature extractor"},
        {"scorer", "null", "no-reference quality scorer"},
        {"cubes", "", "directory of HSC1 results"},
        {"truth", "", "directory of HSC1 ground truth, matched by name"},
        {"period", "4", "MSFA period for IPS"}},
       "",
       false,
       cmd_evaluate},
      {"pixel-diff",
       "Per-band boxplot of a - b",
       {{"a", "", "HSC1 cube"}, {"b", "", "HSC1 cube"}},
       "",
       false,
       cmd_pixel_diff},
      {"benchmark",
       "Inference latency",
       {checkpoint,
        {"height", "720", "frame height"},
        {"width", "1280", "frame width"},
        {"frames", "100", "timed frames"},
        {"warmup", "2", "untimed frames"},
        {"threads", "1", "intra-op threads"}},
       "",
       true,
       cmd_benchmark},
      {"bt-fit",
       "Bradley-Terry fit of pairwise votes",
       {{"input", "", "CSV method_a,method_b,wins_a,wins_b"},
        {"tol", "1e-10", "relative tolerance"},
        {"max_iter", "10000", "iteration limit"}},
       "",
       false,
       cmd_bt_fit},
  };
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto table = commands();
  const train::TrainConfig train_defaults;
  const auto train_kv = train::to_key_values(train_defaults);

  std::set<std::string> all_keys = {"seed", "out"};
  for (const auto& c : table)
    for (const auto& k : c.keys) all_keys.insert(k.key);
  for (const auto& [k, _] : train_kv) all_keys.insert(k);

  CLI::App app{"Self-supervised snapshot hyperspectral demosaicking toolkit", "hsd"};
  app.require_subcommand(1);
  struct Bound {
    const Command* cmd;
    CLI::App* sub;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config;
    std::vector<std::string> sets;
  };
  std::vector<Bound> bound(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto& b = bound[i];
    b.cmd = &table[i];
    b.sub = app.add_subcommand(table[i].name, table[i].help);
    b.sub->add_option("--config", b.config, "YAML configuration file");
    b.sub->add_option("--set", b.sets, "override: key=value (repeatable)");
    auto bind = [&](const std::string& key, const std::string& help) {
      const bool positional = key == table[i].positional;
      b.options[key] = b.sub->add_option(positional ? key : "--" + key, b.values[key], help);
    };
    bind("seed", "random seed");
    bind("out", "output directory");
    for (const auto& k : table[i].keys) bind(k.key, k.help);
    if (table[i].train_keys)
      for (const auto& [k, _] : train_kv)
        if (k != "seed") bind(k, "training configuration");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  const Bound* chosen = nullptr;
  for (const auto& b : bound)
    if (b.sub->parsed()) chosen = &b;
  const Command& cmd = *chosen->cmd;

  // Resolution order: defaults, config file, --set, explicit flags.
  KeyValues kv{{"seed", "0"}, {"out", "."}};
  for (const auto& k : cmd.keys) kv[k.key] = k.def;
  if (cmd.train_keys)
    for (const auto& [k, v] : train_kv) kv[k] = v;
  auto accepts = [&](const std::string& key) { return chosen->options.count(key) != 0; };

  RunRecord rec;
  rec.command = cmd.name;
  fs::path out_dir;
  try {
    if (!chosen->config.empty()) {
      const auto path = resolve_input(chosen->config);
      for (const auto& [k, v] : load_config_file(path)) {
        if (accepts(k)) kv[k] = v;
        else if (!all_keys.count(k)) throw ConfigError("unknown configuration key '" + k + "' in " + path.string());
      }
      rec.inputs.push_back(digest_file(path));
    }
    for (const auto& s : chosen->sets) {
      auto [k, v] = split_assignment(s);
      if (!accepts(k)) throw UsageError("'" + k + "' is not a key of " + cmd.name);
      kv[k] = v;
    }
    for (const auto& [k, opt] : chosen->options)
      if (opt->count() > 0) kv[k] = chosen->values.at(k);

    out_dir = kv.at("out");
    fs::create_directories(out_dir);
    Context ctx(kv, out_dir, out);
    ctx.record() = rec;
    ctx.record().config = kv;
    ctx.record().config_hash = hash_key_values(kv);
    ctx.record().seed = static_cast<std::uint64_t>(ctx.integer("seed"));
    try {
      cmd.run(ctx);
    } catch (const std::exception& e) {
      ctx.record().status = "error";
      ctx.record().error = e.what();
      write_run_record(out_dir, ctx.record());
      throw;
    }
    write_run_record(out_dir, ctx.record());
    return 0;
  } catch (const UsageError& e) {
    err << "hsd: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "hsd: " << e.what() << "\n";
    return 1;
  } catch (const c10::Error& e) {
    err << "hsd: torch error: " << e.what_without_backtrace() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "hsd: internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hsd::cli
