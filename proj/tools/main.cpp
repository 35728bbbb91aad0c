#include <string>

#include <CLI11.hpp>

#include "jointex/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"joint entity and relation extraction trainer"};
  app.require_subcommand(1);

  std::string config_path, checkpoint, corpus, mode = "S";
  std::string input_path, output_path;
  double alpha = 0.0;
  std::string adv_flag;
  std::uint64_t seed = 0;

  CLI::App* train = app.add_subcommand("train", "train a model from a config");
  train->add_option("--config", config_path, "run config (JSON)")->required();
  CLI::Option* alpha_opt =
      train->add_option("--alpha", alpha, "perturbation scaling override");
  CLI::Option* adv_opt = train->add_option(
      "--adv", adv_flag, "adversarial training on|off override");
  CLI::Option* seed_opt = train->add_option("--seed", seed, "seed override");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--config", config_path, "run config (JSON)")->required();
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--corpus", corpus, "gold corpus file")->required();
  eval->add_option("--mode", mode, "evaluation mode S|B|R")->required();

  CLI::App* predict = app.add_subcommand("predict", "tag a corpus file");
  predict->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  predict->add_option("--in", input_path, "input corpus file")->required();
  predict->add_option("--out", output_path, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) {
    jointex::TrainOverrides overrides;
    if (alpha_opt->count() > 0) overrides.alpha = alpha;
    if (adv_opt->count() > 0) {
      if (adv_flag != "on" && adv_flag != "off") {
        std::cerr << "config error: --adv expects 'on' or 'off'\n";
        return jointex::kExitConfig;
      }
      overrides.adv_enabled = (adv_flag == "on");
    }
    if (seed_opt->count() > 0) overrides.seed = seed;
    return jointex::cmd_train(config_path, overrides);
  }
  if (eval->parsed()) {
    return jointex::cmd_eval(config_path, checkpoint, corpus, mode);
  }
  return jointex::cmd_predict(checkpoint, input_path, output_path);
}
