// ltr_synthetic: writes the synthetic street scene used by the end-to-end checks.

#include <CLI11.hpp>
#include <iostream>

#include "ltr/pipeline/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic annotated street scene"};
  std::string dir;
  ltr::pipeline::SyntheticOptions opt;
  app.add_option("--output", dir, "scene directory")->required();
  app.add_option("--frames", opt.frames, "number of frames")->check(CLI::PositiveNumber);
  app.add_option("--width", opt.width, "image width")->check(CLI::PositiveNumber);
  app.add_option("--height", opt.height, "image height")->check(CLI::PositiveNumber);
  app.add_option("--noise", opt.label_noise, "label noise fraction")->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", opt.seed, "random seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    const auto scene = ltr::pipeline::write_synthetic_scene(dir, opt);
    std::cout << "wrote " << scene.frame_names.size() << " frames; config " << scene.config_path << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
