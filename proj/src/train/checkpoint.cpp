#include "hsd/train/checkpoint.hpp"

#include <cstring>

#include "hsd/errors.hpp"

namespace hsd::train {
namespace {

constexpr char kMagic[] = "HCK1";

enum class DType : std::uint8_t { kF32 = 0, kF64 = 1, kI64 = 2 };

DType dtype_code(const torch::Tensor& t) {
  switch (t.scalar_type()) {
    case torch::kFloat32: return DType::kF32;
    case torch::kFloat64: return DType::kF64;
    case torch::kInt64: return DType::kI64;
    default: throw ConfigError(std::string("unsupported checkpoint dtype ") + c10::toString(t.scalar_type()));
  }
}

torch::ScalarType scalar_type(DType d) {
  switch (d) {
    case DType::kF32: return torch::kFloat32;
    case DType::kF64: return torch::kFloat64;
    case DType::kI64: return torch::kInt64;
  }
  return torch::kFloat32;
}

void write_tensors(io::ByteWriter& w, const std::vector<NamedTensor>& ts) {
  w.u32(static_cast<std::uint32_t>(ts.size()));
  for (const auto& [name, value] : ts) {
    auto t = value.detach().cpu().contiguous();
    w.str(name);
    const auto code = dtype_code(t);
    w.bytes(reinterpret_cast<const std::uint8_t*>(&code), 1);
    w.u32(static_cast<std::uint32_t>(t.dim()));
    for (auto s : t.sizes()) w.u64(static_cast<std::uint64_t>(s));
    w.bytes(static_cast<const std::uint8_t*>(t.data_ptr()), t.nbytes());
  }
}

std::vector<NamedTensor> read_tensors(io::ByteReader& r) {
  const auto count = r.u32("tensor count");
  std::vector<NamedTensor> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto name = r.str("tensor name");
    const auto at = r.offset();
    const auto code = *r.take(1, "tensor dtype");
    if (code > 2) throw ParseError("unknown tensor dtype " + std::to_string(code), at);
    const auto ndim = r.u32("tensor rank");
    if (ndim > 8) throw ParseError("tensor rank " + std::to_string(ndim) + " too large", at);
    std::vector<std::int64_t> shape;
    std::uint64_t numel = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      const auto s = r.u64("tensor dims");
      if (s > (std::uint64_t{1} << 34) || (s && numel > (std::uint64_t{1} << 34) / s)) {
        throw ParseError("tensor '" + name + "' too large", at);
      }
      numel *= s;
      shape.push_back(static_cast<std::int64_t>(s));
    }
    auto t = torch::empty(shape, scalar_type(static_cast<DType>(code)));
    const auto* p = r.take(t.nbytes(), "tensor data");
    std::memcpy(t.data_ptr(), p, t.nbytes());
    out.push_back({std::move(name), std::move(t)});
  }
  return out;
}

}  // namespace

Models make_models(const TrainConfig& cfg) {
  cfg.validate();
  torch::manual_seed(cfg.seed);
  Models m;
  m.demosaic = nn::DemosaicNet(cfg.generator);
  m.rgb = nn::RgbConverter(cfg.rgb);
  m.spectral = nn::SpectralRecoveryNet(cfg.spectral);
  m.discriminator = nn::PatchDiscriminator(cfg.discriminator);
  return m;
}

std::vector<NamedTensor> capture_module(const torch::nn::Module& m) {
  std::vector<NamedTensor> out;
  for (const auto& p : m.named_parameters()) out.push_back({p.key(), p.value().detach().clone()});
  for (const auto& b : m.named_buffers()) out.push_back({"buffer:" + b.key(), b.value().detach().clone()});
  return out;
}

void restore_module(torch::nn::Module& m, const std::vector<NamedTensor>& state, const std::string& label) {
  torch::NoGradGuard guard;
  std::vector<std::pair<std::string, torch::Tensor>> targets;
  for (const auto& p : m.named_parameters()) targets.emplace_back(p.key(), p.value());
  for (const auto& b : m.named_buffers()) targets.emplace_back("buffer:" + b.key(), b.value());
  if (targets.size() != state.size()) {
    throw ConfigError(label + " checkpoint has " + std::to_string(state.size()) + " tensors, network has " +
                      std::to_string(targets.size()));
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    auto& [name, dst] = targets[i];
    if (name != state[i].name || dst.sizes() != state[i].value.sizes()) {
      throw ConfigError(label + " checkpoint tensor '" + state[i].name + "' does not match '" + name + "'");
    }
    dst.copy_(state[i].value);
  }
}

std::vector<NamedTensor> capture_adam(const torch::optim::Adam& opt, const std::string& prefix) {
  std::vector<NamedTensor> out;
  const auto& states = opt.state();
  std::size_t index = 0;
  for (const auto& group : opt.param_groups()) {
    for (const auto& p : group.params()) {
      const auto tag = prefix + "." + std::to_string(index++);
      auto it = states.find(p.unsafeGetTensorImpl());
      if (it == states.end()) continue;
      const auto& s = static_cast<const torch::optim::AdamParamState&>(*it->second);
      out.push_back({tag + ".step", torch::tensor(s.step(), torch::kInt64)});
      out.push_back({tag + ".exp_avg", s.exp_avg().detach().clone()});
      out.push_back({tag + ".exp_avg_sq", s.exp_avg_sq().detach().clone()});
    }
  }
  return out;
}

void restore_adam(torch::optim::Adam& opt, const std::vector<NamedTensor>& state, const std::string& prefix) {
  std::map<std::string, torch::Tensor> by_name;
  for (const auto& [name, value] : state)
    if (name.rfind(prefix + ".", 0) == 0) by_name[name] = value;
  auto& states = opt.state();
  states.clear();
  std::size_t index = 0, used = 0;
  for (auto& group : opt.param_groups()) {
    for (auto& p : group.params()) {
      const auto tag = prefix + "." + std::to_string(index++);
      auto step = by_name.find(tag + ".step");
      if (step == by_name.end()) continue;
      auto avg = by_name.find(tag + ".exp_avg");
      auto sq = by_name.find(tag + ".exp_avg_sq");
      if (avg == by_name.end() || sq == by_name.end() || avg->second.sizes() != p.sizes() ||
          sq->second.sizes() != p.sizes()) {
        throw ConfigError("optimizer state for " + tag + " is incomplete or misshapen");
      }
      auto s = std::make_unique<torch::optim::AdamParamState>();
      s->step(step->second.item<std::int64_t>());
      s->exp_avg(avg->second.clone());
      s->exp_avg_sq(sq->second.clone());
      states[p.unsafeGetTensorImpl()] = std::move(s);
      used += 3;
    }
  }
  if (used != by_name.size()) throw ConfigError("optimizer state for '" + prefix + "' has unmatched entries");
}

Checkpoint capture(const Models& m, const TrainConfig& cfg, Phase phase, std::int64_t step) {
  Checkpoint c;
  c.phase = phase;
  c.config_hash = config_hash(cfg);
  c.model_hash = model_hash(cfg);
  c.step = step;
  c.demosaic = capture_module(*m.demosaic);
  c.rgb = capture_module(*m.rgb);
  c.spectral = capture_module(*m.spectral);
  c.discriminator = capture_module(*m.discriminator);
  return c;
}

void restore(const Checkpoint& c, Models& m) {
  restore_module(*m.demosaic, c.demosaic, "demosaic");
  restore_module(*m.rgb, c.rgb, "rgb");
  restore_module(*m.spectral, c.spectral, "spectral");
  restore_module(*m.discriminator, c.discriminator, "discriminator");
}

io::Bytes encode_checkpoint(const Checkpoint& c) {
  io::ByteWriter w;
  w.raw(std::string_view(kMagic, 4));
  w.u32(Checkpoint::kVersion);
  w.u32(static_cast<std::uint32_t>(c.phase));
  w.str(c.config_hash);
  w.str(c.model_hash);
  w.u64(static_cast<std::uint64_t>(c.step));
  for (const auto* part : {&c.demosaic, &c.rgb, &c.spectral, &c.discriminator, &c.optimizer}) write_tensors(w, *part);
  return w.take();
}

Checkpoint decode_checkpoint(const io::Bytes& data) {
  io::ByteReader r(data);
  if (r.raw(4, "magic") != std::string_view(kMagic, 4)) throw ParseError("not a checkpoint (bad magic)", 0);
  const auto at = r.offset();
  const auto version = r.u32("version");
  if (version != Checkpoint::kVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version), at);
  }
  Checkpoint c;
  const auto phase_at = r.offset();
  const auto phase = r.u32("phase");
  if (phase > 2) throw ParseError("unknown checkpoint phase " + std::to_string(phase), phase_at);
  c.phase = static_cast<Phase>(phase);
  c.config_hash = r.str("config hash");
  c.model_hash = r.str("model hash");
  c.step = static_cast<std::int64_t>(r.u64("step"));
  for (auto* part : {&c.demosaic, &c.rgb, &c.spectral, &c.discriminator, &c.optimizer}) *part = read_tensors(r);
  if (r.remaining() != 0) throw ParseError("trailing bytes after checkpoint", r.offset());
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  io::write_file_atomic(path, encode_checkpoint(c));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(io::read_file(path)); }

void require_compatible(const Checkpoint& c, const TrainConfig& cfg) {
  if (c.model_hash != model_hash(cfg)) {
    throw ConfigError("checkpoint networks (model hash " + c.model_hash.substr(0, 12) +
                      ") do not match the configuration (" + model_hash(cfg).substr(0, 12) + ")");
  }
}

}  // namespace hsd::train
