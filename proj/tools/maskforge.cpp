// maskforge command-line entry point: serve | batch-slic | validate.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "maskforge/batch.hpp"
#include "maskforge/error.hpp"
#include "maskforge/service.hpp"
#include "maskforge/session.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bind(const std::string& bind, std::string& host, int& port) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) return false;
  host = bind.substr(0, colon);
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    return false;
  }
  return !host.empty() && port >= 0 && port <= 65535;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maskforge: per-class segmentation mask annotation engine"};
  app.require_subcommand(1);

  std::string serve_dir, serve_classes = "object", serve_bind = "127.0.0.1:8080", serve_masks;
  auto* serve = app.add_subcommand("serve", "Serve the annotation HTTP API for a folder of images");
  serve->add_option("--dir", serve_dir, "Image folder")->required();
  serve->add_option("--classes", serve_classes, "Comma-separated class names");
  serve->add_option("--bind", serve_bind, "HOST:PORT to listen on");
  serve->add_option("--masks", serve_masks, "Mask folder (default: beside the images)");

  std::string slic_dir, slic_out;
  maskforge::SlicParams params;
  bool serial = false;
  auto* slic = app.add_subcommand("batch-slic", "Write superpixel label maps for every image");
  slic->add_option("--dir", slic_dir, "Image folder")->required();
  slic->add_option("--out", slic_out, "Output folder")->required();
  slic->add_option("--k", params.k, "Desired superpixel count");
  slic->add_option("--m", params.m, "Compactness");
  slic->add_option("--iters", params.iterations, "Iterations");
  slic->add_flag("--serial", serial, "Use the serial reference kernels");

  std::string validate_dir;
  auto* validate = app.add_subcommand("validate", "Check mask files and checkpoint integrity");
  validate->add_option("--dir", validate_dir, "Folder to check")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      std::string host;
      int port = 0;
      if (!parse_bind(serve_bind, host, port)) {
        std::cerr << "error: --bind must be HOST:PORT\n";
        return 2;
      }
      maskforge::SessionOptions options;
      options.mask_dir = serve_masks;
      maskforge::Service service(
          maskforge::Session::open({serve_dir}, split_csv(serve_classes), options));
      maskforge::serve(service, host, port);
      return 0;
    }

    if (*slic) {
      maskforge::SlicOptions options;
      options.parallel = !serial;
      const auto report = maskforge::batch_slic(slic_dir, params, slic_out, options);
      for (const auto& p : report.written) std::cout << "wrote " << p.string() << "\n";
      for (const auto& f : report.failures) {
        std::cerr << "failed " << f.path.string() << ": " << f.message << "\n";
      }
      return report.ok() ? 0 : 1;
    }

    if (*validate) {
      const auto report = maskforge::validate_directory(validate_dir);
      for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
      for (const auto& e : report.errors) std::cout << "error: " << e << "\n";
      std::cout << report.masks_checked << " mask file(s) checked, " << report.errors.size()
                << " error(s)\n";
      return report.ok() ? 0 : 1;
    }
  } catch (const maskforge::Error& e) {
    std::cerr << "error [" << maskforge::error_code_name(e.code()) << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
