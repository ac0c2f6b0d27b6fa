#include <gtest/gtest.h>

#include <fstream>

#include "detect/app/commands.hpp"
#include "detect/app/run_config.hpp"
#include "detect/core/errors.hpp"
#include "fixtures.hpp"

namespace detect::app {
namespace {

TEST(RunConfig, DefaultsAreTheReferenceRecipe) {
  const RunConfig c;
  c.validate();
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.epochs, 100u);
  EXPECT_EQ(c.batch_size, 32u);
  EXPECT_EQ(c.lr, 0.001);
  EXPECT_EQ(c.weight_decay, 1e-4);
  EXPECT_EQ(c.label_smoothing, 0.1);
  EXPECT_EQ(c.clip_norm, 1.0);
  EXPECT_EQ(c.split_text(), "holdout_0.8");
  EXPECT_EQ(c.nrs_predicate, eval::NrsPredicate::both);
  EXPECT_EQ(c.preprocess.window, 100u);
  EXPECT_EQ(c.preprocess.step, 50u);
  EXPECT_EQ(c.preprocess.trim_s, 2.5);

  const auto o = c.train_options();
  EXPECT_EQ(o.epochs, 100u);
  EXPECT_EQ(o.learning_rate, 0.001);
  EXPECT_EQ(o.seed, 42u);
  const auto m = c.model_config();
  EXPECT_EQ(m.seed, 42u);
  EXPECT_EQ(m.seq_len, 100u);
  EXPECT_EQ(m.latent_dim, 64u);
}

TEST(RunConfig, TextRoundTrip) {
  RunConfig c;
  c.seed = 7;
  c.lr = 0.1 + 0.2;  // not representable as a short decimal
  c.set("split", "kfold_5");
  c.set("nrs_predicate", "or");
  c.set("activation", "relu");
  c.set("positional_encoding", "false");
  c.set("split_granularity", "trial");
  const auto back = parse_run_config(c.to_text());
  EXPECT_EQ(back.to_text(), c.to_text());
  EXPECT_EQ(back.lr, c.lr);
  EXPECT_EQ(back.split_mode, SplitMode::kfold);
  EXPECT_EQ(back.folds, 5u);
  EXPECT_EQ(back.nrs_predicate, eval::NrsPredicate::either);
  EXPECT_FALSE(back.model.positional_encoding);
  EXPECT_EQ(back.split_granularity, data::SplitGranularity::trial);
  EXPECT_EQ(parse_run_config(RunConfig{}.to_text()).to_text(), RunConfig{}.to_text());
}

TEST(RunConfig, ParsesCommentsAndSpacing) {
  const auto c = parse_run_config(
      "# training\n"
      "  lr =  0.002   # faster\n"
      "\n"
      "split = holdout_0.75\n"
      "epochs=3\n");
  EXPECT_EQ(c.lr, 0.002);
  EXPECT_EQ(c.train_fraction, 0.75);
  EXPECT_EQ(c.epochs, 3u);
}

std::string error_of(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "no error";
}

TEST(RunConfig, ErrorsNameLineAndKey) {
  EXPECT_NE(error_of("lr = 0.1\nwat = 3\n").find("config line 2"), std::string::npos);
  EXPECT_NE(error_of("lr = 0.1\nwat = 3\n").find("unknown config key 'wat'"), std::string::npos);
  EXPECT_NE(error_of("epochs = -1\n").find("epochs"), std::string::npos);
  EXPECT_NE(error_of("lr = fast\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("split = holdout\n").find("split"), std::string::npos);
  EXPECT_NE(error_of("nrs_predicate = maybe\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("no equals sign\n").find("key = value"), std::string::npos);
}

TEST(RunConfig, ValidationRejectsBadValues) {
  EXPECT_THROW(parse_run_config("epochs = 0\n"), ConfigError);
  EXPECT_THROW(parse_run_config("lr = 0\n"), ConfigError);
  EXPECT_THROW(parse_run_config("label_smoothing = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("split = holdout_1.0\n"), ConfigError);
  EXPECT_THROW(parse_run_config("split = kfold_1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("num_heads = 3\n"), ConfigError);
  EXPECT_THROW(parse_run_config("latent_dim = 63\nnum_heads = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("dropout = 1.5\n"), ConfigError);
  EXPECT_THROW(parse_run_config("window = 0\n"), ConfigError);
}

TEST(ResolveConfig, Precedence) {
  testing::TempDir dir;
  const auto file = dir.path() / "run.cfg";
  std::ofstream(file) << "seed = 5\nepochs = 9\nlr = 0.01\n";
  CommonOptions options;
  options.config = file;
  EXPECT_EQ(resolve_config(options).seed, 5u);
  EXPECT_EQ(resolve_config(options).epochs, 9u);

  options.overrides = {"epochs=4", "lr = 0.02"};
  auto c = resolve_config(options);
  EXPECT_EQ(c.epochs, 4u);
  EXPECT_EQ(c.lr, 0.02);

  options.epochs = 2;
  options.seed = 11;
  c = resolve_config(options);
  EXPECT_EQ(c.epochs, 2u);
  EXPECT_EQ(c.seed, 11u);

  options.overrides = {"epochs"};
  EXPECT_THROW(resolve_config(options), ConfigError);
  options.overrides.clear();
  options.epochs = 0;
  EXPECT_THROW(resolve_config(options), ConfigError);
}

TEST(ResolveConfig, MissingFileIsConfigError) {
  CommonOptions options;
  options.config = "/nonexistent/run.cfg";
  EXPECT_THROW(resolve_config(options), ConfigError);
}

}  // namespace
}  // namespace detect::app
