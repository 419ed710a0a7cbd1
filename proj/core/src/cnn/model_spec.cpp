#include "wearnet/cnn/model_spec.hpp"

#include <algorithm>
#include <sstream>

#include "wearnet/error.hpp"

namespace wearnet::cnn {
namespace {

std::vector<LayerSpec> alexnet_body(std::size_t d, std::size_t pad5, std::size_t pad3) {
  const auto w = [d](std::size_t c) { return std::max<std::size_t>(1, c / d); };
  return {LayerSpec::conv(5, 5, w(96), pad5), LayerSpec::relu(), LayerSpec::maxpool(2, 2),
          LayerSpec::conv(3, 3, w(256), pad3), LayerSpec::relu(), LayerSpec::maxpool(2, 2),
          LayerSpec::conv(3, 3, w(384), pad3), LayerSpec::relu(), LayerSpec::maxpool(2, 2),
          LayerSpec::conv(3, 3, w(384), pad3), LayerSpec::relu(),
          LayerSpec::conv(3, 3, w(256), pad3), LayerSpec::relu(), LayerSpec::maxpool(2, 2)};
}

std::vector<LayerSpec> wen_body(std::size_t d, std::size_t pad5, std::size_t pad3) {
  const auto w = [d](std::size_t c) { return std::max<std::size_t>(1, c / d); };
  return {LayerSpec::conv(5, 5, w(32), pad5),  LayerSpec::relu(), LayerSpec::maxpool(2, 2),
          LayerSpec::conv(3, 3, w(64), pad3),  LayerSpec::relu(), LayerSpec::maxpool(2, 2),
          LayerSpec::conv(3, 3, w(128), pad3), LayerSpec::relu(), LayerSpec::maxpool(2, 2),
          LayerSpec::conv(3, 3, w(256), pad3), LayerSpec::relu(), LayerSpec::maxpool(2, 2)};
}

std::vector<LayerSpec> lenet_body(std::size_t d, std::size_t pad5) {
  const auto w = [d](std::size_t c) { return std::max<std::size_t>(1, c / d); };
  return {LayerSpec::conv(5, 5, w(6), pad5), LayerSpec::relu(), LayerSpec::avgpool(2, 2),
          LayerSpec::conv(5, 5, w(16), pad5), LayerSpec::relu(), LayerSpec::avgpool(2, 2)};
}

const char* kind_token(LayerKind k) {
  switch (k) {
    case LayerKind::kConv: return "conv";
    case LayerKind::kMaxPool: return "maxpool";
    case LayerKind::kAvgPool: return "avgpool";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kFc: return "fc";
    case LayerKind::kSoftmaxOutput: return "softmax";
  }
  return "?";
}

}  // namespace

std::string LayerSpec::str() const {
  const auto dims = [](std::size_t a, std::size_t b) { return std::to_string(a) + "x" + std::to_string(b); };
  switch (kind) {
    case LayerKind::kConv: return "Conv(" + dims(kernel_h, kernel_w) + "x" + std::to_string(units) + ")";
    case LayerKind::kMaxPool: return "Maxpool(" + dims(kernel_h, kernel_w) + ")";
    case LayerKind::kAvgPool: return "Avgpool(" + dims(kernel_h, kernel_w) + ")";
    case LayerKind::kRelu: return "ReLU";
    case LayerKind::kFc: return "FC(" + std::to_string(units) + ")";
    case LayerKind::kSoftmaxOutput: return "FC(" + std::to_string(units) + ")+Softmax";
  }
  return "?";
}

std::size_t ModelSpec::classes() const {
  if (layers.empty() || layers.back().kind != LayerKind::kSoftmaxOutput) {
    raise(ErrorKind::kShape, "model has no softmax output layer");
  }
  return layers.back().units;
}

std::vector<ActivationShape> ModelSpec::shape_trace() const {
  if (input_channels == 0 || input_size == 0) raise(ErrorKind::kShape, "empty model input");
  std::vector<ActivationShape> trace{{input_channels, input_size, input_size}};
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    ActivationShape s = trace.back();
    const std::string where = name + " layer " + std::to_string(i + 1) + " " + l.str();
    switch (l.kind) {
      case LayerKind::kConv: {
        if (l.units == 0 || l.kernel_h == 0 || l.kernel_w == 0) raise(ErrorKind::kShape, where + ": zero size");
        const std::size_t ph = s.h + 2 * l.padding, pw = s.w + 2 * l.padding;
        if (ph < l.kernel_h || pw < l.kernel_w) {
          raise(ErrorKind::kShape, where + ": kernel larger than " + std::to_string(s.h) + "x" +
                                       std::to_string(s.w) + " input");
        }
        s = {l.units, ph - l.kernel_h + 1, pw - l.kernel_w + 1};
        break;
      }
      case LayerKind::kMaxPool:
      case LayerKind::kAvgPool:
        if (l.kernel_h == 0 || l.kernel_w == 0 || s.h % l.kernel_h != 0 || s.w % l.kernel_w != 0 ||
            s.h < l.kernel_h) {
          raise(ErrorKind::kShape, where + ": pool does not divide " + std::to_string(s.h) + "x" +
                                       std::to_string(s.w));
        }
        s = {s.c, s.h / l.kernel_h, s.w / l.kernel_w};
        break;
      case LayerKind::kRelu:
        break;
      case LayerKind::kFc:
      case LayerKind::kSoftmaxOutput:
        if (l.units == 0) raise(ErrorKind::kShape, where + ": zero units");
        if (l.kind == LayerKind::kSoftmaxOutput && i + 1 != layers.size()) {
          raise(ErrorKind::kShape, where + ": softmax output must be the last layer");
        }
        s = {l.units, 1, 1};
        break;
    }
    trace.push_back(s);
  }
  if (layers.empty() || layers.back().kind != LayerKind::kSoftmaxOutput) {
    raise(ErrorKind::kShape, name + ": last layer must be the softmax output");
  }
  return trace;
}

std::string model_name(std::string_view preset, std::size_t fc1, std::size_t fc2) {
  std::string base = preset == "alexnet-mod" ? "CNN" : "LeNet5";
  if (preset == "lenet5") return base;
  base += "-" + std::to_string(fc1);
  if (fc2 > 0) base += "-" + std::to_string(fc2);
  return base;
}

ModelSpec make_preset(const PresetOptions& o) {
  if (o.width_divisor == 0 || o.classes == 0) raise(ErrorKind::kConfig, "invalid preset options");
  const bool lenet = o.preset == "lenet5";
  if (!lenet && o.fc1 == 0) raise(ErrorKind::kConfig, "first FC width must be >= 1");
  if (o.preset != "alexnet-mod" && o.preset != "lenet5-wen" && !lenet) {
    raise(ErrorKind::kConfig, "unknown preset '" + o.preset + "'");
  }

  auto build = [&](bool same) {
    ModelSpec spec;
    spec.name = model_name(o.preset, o.fc1, o.fc2);
    spec.input_size = o.input_size;
    const std::size_t pad5 = same ? 2 : 0, pad3 = same ? 1 : 0;
    if (o.preset == "alexnet-mod") {
      spec.layers = alexnet_body(o.width_divisor, pad5, pad3);
    } else if (o.preset == "lenet5-wen") {
      spec.layers = wen_body(o.width_divisor, pad5, pad3);
    } else {
      spec.layers = lenet_body(o.width_divisor, pad5);
    }
    if (lenet) {
      spec.layers.insert(spec.layers.end(), {LayerSpec::fc(120), LayerSpec::relu(),
                                             LayerSpec::fc(84), LayerSpec::relu()});
    } else {
      spec.layers.insert(spec.layers.end(), {LayerSpec::fc(o.fc1), LayerSpec::relu()});
      if (o.fc2 > 0) spec.layers.insert(spec.layers.end(), {LayerSpec::fc(o.fc2), LayerSpec::relu()});
    }
    spec.layers.push_back(LayerSpec::softmax_output(o.classes));
    return spec;
  };

  ModelSpec valid = build(false);
  try {
    valid.shape_trace();
    return valid;
  } catch (const Error&) {
  }
  ModelSpec same = build(true);
  same.shape_trace();
  return same;
}

std::string serialize_model_spec(const ModelSpec& spec) {
  std::ostringstream out;
  out << "name " << spec.name << "\n";
  out << "input " << spec.input_channels << " " << spec.input_size << "\n";
  for (const auto& l : spec.layers) {
    out << kind_token(l.kind) << " " << l.kernel_h << " " << l.kernel_w << " " << l.units << " "
        << l.padding << "\n";
  }
  return out.str();
}

ModelSpec parse_model_spec(std::string_view text) {
  std::istringstream in{std::string(text)};
  ModelSpec spec;
  std::string line;
  bool have_name = false, have_input = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "name") {
      spec.name = line.size() > 5 ? line.substr(5) : "";
      have_name = true;
    } else if (tok == "input") {
      if (!(ls >> spec.input_channels >> spec.input_size)) raise(ErrorKind::kFormat, "bad input line");
      have_input = true;
    } else {
      LayerSpec l;
      bool known = false;
      for (LayerKind k : {LayerKind::kConv, LayerKind::kMaxPool, LayerKind::kAvgPool, LayerKind::kRelu,
                          LayerKind::kFc, LayerKind::kSoftmaxOutput}) {
        if (tok == kind_token(k)) {
          l.kind = k;
          known = true;
        }
      }
      if (!known || !(ls >> l.kernel_h >> l.kernel_w >> l.units >> l.padding)) {
        raise(ErrorKind::kFormat, "bad layer line '" + line + "'");
      }
      spec.layers.push_back(l);
    }
  }
  if (!have_name || !have_input) raise(ErrorKind::kFormat, "model spec missing name or input");
  spec.shape_trace();
  return spec;
}

}  // namespace wearnet::cnn
