#include <iostream>

#include <CLI11.hpp>

#include "lomtree/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lomtree: online logarithmic-time multiclass classification"};
  app.require_subcommand(1);

  const std::vector<std::string> algos{"lomtree", "rtree", "oaa"};

  lomtree::cli::TrainOptions train_opt;
  CLI::App* train = app.add_subcommand("train", "Train a model online and optionally save it");
  train->add_option("--algo", train_opt.algo, "lomtree | rtree | oaa")
      ->check(CLI::IsMember(algos));
  train->add_option("--data", train_opt.data_path, "Training data (libsvm lines, .gz accepted)")
      ->required();
  train->add_option("--model", train_opt.model_path, "Output model file");
  train->add_option("--step", train_opt.step, "SGD step size");
  train->add_option("--passes", train_opt.passes, "Passes over the data");
  train->add_option("--max_nodes", train_opt.max_nodes,
                    "Max internal tree nodes T (default: classes - 1)");
  train->add_option("--swap_resistance", train_opt.swap_resistance, "Swap resistance R_S");
  train->add_option("--seed", train_opt.seed, "Seed for shuffling and tree building");
  train->add_flag("--no_shuffle", train_opt.no_shuffle, "Keep input order on every pass");

  lomtree::cli::EvalOptions eval_opt;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a saved model on labeled data");
  eval->add_option("--model", eval_opt.model_path, "Model file")->required();
  eval->add_option("--data", eval_opt.data_path, "Evaluation data")->required();
  eval->add_flag("--json", eval_opt.json, "Emit a single-line JSON record");

  lomtree::cli::SweepOptions sweep_opt;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Grid-search hyperparameters against a validation split");
  sweep->add_option("--algo", sweep_opt.algo, "lomtree | rtree | oaa")
      ->check(CLI::IsMember(algos));
  sweep->add_option("--data", sweep_opt.data_path, "Dataset; split 90/10 with a validation carve-out")
      ->required();
  sweep->add_option("--model", sweep_opt.model_path, "Retrain the winner and save it here");
  sweep->add_option("--grid-steps", sweep_opt.grid_steps, "Comma-separated step sizes")
      ->delimiter(',');
  sweep->add_option("--grid-T", sweep_opt.grid_max_nodes, "Comma-separated max node budgets")
      ->delimiter(',');
  sweep->add_option("--grid-rs", sweep_opt.grid_rs, "Comma-separated swap resistances")
      ->delimiter(',');
  sweep->add_option("--passes", sweep_opt.passes, "Max passes per grid point");
  sweep->add_option("--seed", sweep_opt.seed, "Seed for splitting and shuffling");
  sweep->add_option("--threads", sweep_opt.threads,
                    "Concurrent grid points (default: LOMTREE_THREADS or all cores)");
  sweep->add_flag("--no_shuffle", sweep_opt.no_shuffle, "Keep input order on every pass");
  sweep->add_flag("--json", sweep_opt.json, "Emit a single-line JSON record");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return lomtree::cli::kExitInputError;
  }

  if (train->parsed()) return lomtree::cli::run_train(train_opt, std::cout, std::cerr);
  if (eval->parsed()) return lomtree::cli::run_eval(eval_opt, std::cout, std::cerr);
  if (sweep->parsed()) return lomtree::cli::run_sweep(sweep_opt, std::cout, std::cerr);
  return lomtree::cli::kExitInputError;
}
