#include "hcim/net.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

namespace hcim {

namespace {

using nlohmann::json;

std::vector<char> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  return std::vector<char>(std::istreambuf_iterator<char>(f),
                           std::istreambuf_iterator<char>());
}

struct Cursor {
  const std::vector<char>& buf;
  size_t pos = 0;
  std::string path;

  void need(size_t n) const {
    if (pos + n > buf.size())
      throw ConfigError("truncated file '" + path + "'");
  }
  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(buf[pos++]);
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::string str(size_t n) {
    need(n);
    std::string s(buf.begin() + pos, buf.begin() + pos + n);
    pos += n;
    return s;
  }
  void magic(const char* m) {
    if (str(std::strlen(m)) != m)
      throw ConfigError("bad magic in '" + path + "'");
  }
};

struct RawTensor {
  int dtype = 0;  // 0 = int8, 1 = int32
  std::vector<int64_t> dims;
  std::vector<int32_t> values;
};

std::map<std::string, RawTensor> load_weight_records(const std::string& path) {
  std::vector<char> buf = read_file(path);
  Cursor c{buf, 0, path};
  c.magic("HCIMWTS1");
  uint32_t count = c.u32();
  std::map<std::string, RawTensor> out;
  for (uint32_t r = 0; r < count; ++r) {
    std::string name = c.str(c.u32());
    RawTensor t;
    t.dtype = c.u8();
    if (t.dtype != 0 && t.dtype != 1)
      throw ConfigError("unknown dtype in '" + path + "'");
    uint32_t ndim = c.u32();
    int64_t n = 1;
    for (uint32_t d = 0; d < ndim; ++d) {
      t.dims.push_back(c.u32());
      n *= t.dims.back();
    }
    t.values.reserve(n);
    for (int64_t e = 0; e < n; ++e) {
      if (t.dtype == 0) {
        t.values.push_back(static_cast<int8_t>(c.u8()));
      } else {
        uint32_t v = c.u32();
        t.values.push_back(static_cast<int32_t>(v));
      }
    }
    out[name] = std::move(t);
  }
  return out;
}

const RawTensor& want(const std::map<std::string, RawTensor>& m,
                      const std::string& name, int dtype) {
  auto it = m.find(name);
  if (it == m.end())
    throw ConfigError("weights file is missing tensor '" + name + "'");
  if (it->second.dtype != dtype)
    throw ConfigError("tensor '" + name + "' has the wrong dtype");
  return it->second;
}

}  // namespace

void validate(const NetDescription& net) {
  if (net.in_h < 1 || net.in_w < 1 || net.in_ch < 1)
    throw ShapeError("NetDescription: non-positive input geometry");
  if (net.input_bits < 1 || net.input_bits > 8)
    throw ConfigError("NetDescription: input_bits must be in [1, 8]");
  if (!(net.input_scale > 0.0))
    throw ConfigError("NetDescription: input_scale must be positive");
  for (const Layer& l : net.layers) {
    if (const auto* cv = std::get_if<ConvLayer>(&l)) {
      validate(cv->weight);
      if (cv->weight.shape !=
          std::vector<int64_t>{cv->out_ch, cv->in_ch, cv->kernel, cv->kernel})
        throw ShapeError("conv '" + cv->name + "': weight shape mismatch");
      if (static_cast<int>(cv->bias.size()) != cv->out_ch)
        throw ShapeError("conv '" + cv->name + "': bias size mismatch");
      if (cv->stride < 1 || cv->pad < 0 || cv->kernel < 1)
        throw ConfigError("conv '" + cv->name + "': bad geometry");
    } else if (const auto* fc = std::get_if<FcLayer>(&l)) {
      validate(fc->weight);
      if (fc->weight.shape !=
          std::vector<int64_t>{fc->out_features, fc->in_features})
        throw ShapeError("fc '" + fc->name + "': weight shape mismatch");
      if (static_cast<int>(fc->bias.size()) != fc->out_features)
        throw ShapeError("fc '" + fc->name + "': bias size mismatch");
    } else if (const auto* q = std::get_if<QuantizeLayer>(&l)) {
      if (q->bits < 1 || q->bits > 8 || !(q->scale > 0.0))
        throw ConfigError("quantize layer: bad parameters");
    } else if (const auto* p = std::get_if<PoolLayer>(&l)) {
      if (p->size < 1 || p->stride < 1)
        throw ConfigError("pool layer: bad parameters");
    }
  }
}

NetDescription load_net(const std::string& json_path) {
  json j;
  {
    std::ifstream f(json_path);
    if (!f) throw ConfigError("cannot open '" + json_path + "'");
    try {
      f >> j;
    } catch (const json::exception& e) {
      throw ConfigError("cannot parse '" + json_path + "': " + e.what());
    }
  }
  try {
    if (j.at("schema_version").get<int>() != 1)
      throw ConfigError("net '" + json_path + "': unsupported schema version");
    std::filesystem::path dir =
        std::filesystem::path(json_path).parent_path();
    auto weights = load_weight_records(
        (dir / j.at("weights_file").get<std::string>()).string());

    NetDescription net;
    const json& in = j.at("input");
    net.in_h = in.at("height").get<int>();
    net.in_w = in.at("width").get<int>();
    net.in_ch = in.at("channels").get<int>();
    net.input_bits = in.at("bits").get<int>();
    net.input_scale = in.at("scale").get<double>();

    for (const json& lj : j.at("layers")) {
      std::string type = lj.at("type").get<std::string>();
      if (type == "conv") {
        ConvLayer cv;
        cv.name = lj.at("name").get<std::string>();
        cv.in_ch = lj.at("in_ch").get<int>();
        cv.out_ch = lj.at("out_ch").get<int>();
        cv.kernel = lj.at("kernel").get<int>();
        cv.stride = lj.at("stride").get<int>();
        cv.pad = lj.at("pad").get<int>();
        cv.weight_scale = lj.at("weight_scale").get<double>();
        const RawTensor& w = want(weights, lj.at("weight").get<std::string>(), 0);
        cv.weight = make_quant_tensor(
            {cv.out_ch, cv.in_ch, cv.kernel, cv.kernel}, w.values,
            lj.at("weight_bits").get<int>(), true, cv.weight_scale);
        cv.bias = want(weights, lj.at("bias").get<std::string>(), 1).values;
        net.layers.emplace_back(std::move(cv));
      } else if (type == "fc") {
        FcLayer fc;
        fc.name = lj.at("name").get<std::string>();
        fc.in_features = lj.at("in_features").get<int>();
        fc.out_features = lj.at("out_features").get<int>();
        fc.weight_scale = lj.at("weight_scale").get<double>();
        const RawTensor& w = want(weights, lj.at("weight").get<std::string>(), 0);
        fc.weight = make_quant_tensor({fc.out_features, fc.in_features},
                                      w.values,
                                      lj.at("weight_bits").get<int>(), true,
                                      fc.weight_scale);
        fc.bias = want(weights, lj.at("bias").get<std::string>(), 1).values;
        net.layers.emplace_back(std::move(fc));
      } else if (type == "relu") {
        net.layers.emplace_back(ReluLayer{});
      } else if (type == "maxpool") {
        PoolLayer p;
        p.size = lj.at("size").get<int>();
        p.stride = lj.at("stride").get<int>();
        net.layers.emplace_back(p);
      } else if (type == "quantize") {
        QuantizeLayer q;
        q.bits = lj.at("bits").get<int>();
        q.scale = lj.at("scale").get<double>();
        net.layers.emplace_back(q);
      } else {
        throw ConfigError("net '" + json_path + "': unknown layer type '" +
                          type + "'");
      }
    }
    validate(net);
    return net;
  } catch (const json::exception& e) {
    throw ConfigError("net '" + json_path + "': " + e.what());
  }
}

Dataset load_dataset(const std::string& images_path,
                     const std::string& labels_path) {
  std::vector<char> ibuf = read_file(images_path);
  Cursor ic{ibuf, 0, images_path};
  ic.magic("HCIMIMG1");
  uint32_t count = ic.u32();
  Dataset ds;
  ds.height = static_cast<int>(ic.u32());
  ds.width = static_cast<int>(ic.u32());
  ds.channels = static_cast<int>(ic.u32());
  size_t pixels = static_cast<size_t>(ds.height) * ds.width * ds.channels;
  for (uint32_t n = 0; n < count; ++n) {
    std::string raw = ic.str(pixels);
    ds.images.emplace_back(raw.begin(), raw.end());
  }

  std::vector<char> lbuf = read_file(labels_path);
  Cursor lc{lbuf, 0, labels_path};
  lc.magic("HCIMLAB1");
  uint32_t lcount = lc.u32();
  if (lcount != count)
    throw ShapeError("dataset: image and label counts differ");
  for (uint32_t n = 0; n < lcount; ++n) ds.labels.push_back(lc.u8());
  return ds;
}

}  // namespace hcim
