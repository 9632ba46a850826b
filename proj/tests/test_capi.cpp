// tests/test_capi.cpp

// Copyright 2026  The translab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"

#include "translab/translab.h"

namespace fs = std::filesystem;

namespace {

void collect(const char *line, void *user) {
  static_cast<std::vector<std::string> *>(user)->emplace_back(line);
}

std::string get(const tl_config *c, const char *key) {
  char *v = nullptr;
  REQUIRE(tl_config_get(c, key, &v) == TL_OK);
  std::string s = v;
  tl_string_free(v);
  return s;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(tl_status_name(TL_OK)) == "ok");
  CHECK(std::strlen(tl_version()) > 0);
  CHECK(tl_config_create(nullptr) == TL_ERR_ARGUMENT);
  CHECK(std::strlen(tl_last_error()) > 0);
}

TEST_CASE("config handles") {
  tl_config *c = nullptr;
  REQUIRE(tl_config_create(&c) == TL_OK);
  CHECK(get(c, "seed") == "17");
  CHECK(tl_config_set(c, "seed=5") == TL_OK);
  CHECK(get(c, "seed") == "5");
  CHECK(tl_config_set(c, "no.such=1") == TL_ERR_CONFIG);
  CHECK(tl_config_parse(c, "train.steps = 7\nbroken\n", "t.cfg") == TL_ERR_CONFIG);
  CHECK(std::string(tl_last_error()).find("t.cfg:2") != std::string::npos);
  CHECK(get(c, "train.steps") == "7");
  CHECK(tl_config_load_file(c, "/nonexistent.cfg") == TL_ERR_IO);
  CHECK(tl_config_validate(c) == TL_OK);
  CHECK(tl_config_set(c, "task.umax=40") == TL_OK);
  CHECK(tl_config_validate(c) == TL_ERR_CONFIG);

  char *text = nullptr;
  REQUIRE(tl_config_to_text(c, &text) == TL_OK);
  tl_config *d = nullptr;
  REQUIRE(tl_config_create(&d) == TL_OK);
  CHECK(tl_config_parse(d, text, "copy") == TL_OK);
  CHECK(get(d, "task.umax") == "40");
  tl_string_free(text);
  tl_config_destroy(d);
  tl_config_destroy(c);
}

TEST_CASE("checks through the C API") {
  std::vector<std::string> lines;
  int passed = 0;
  CHECK(tl_gradcheck("loss", 1, 1e-4, collect, &lines, &passed) == TL_OK);
  CHECK(passed == 1);
  CHECK(!lines.empty());
  CHECK(tl_gradcheck("loss", 1, 1e-12, nullptr, nullptr, &passed) == TL_OK);
  CHECK(passed == 0);
  CHECK(tl_gradcheck("bogus", 1, 1e-4, nullptr, nullptr, &passed) == TL_ERR_CONFIG);

  double worst = 1.0;
  CHECK(tl_loss_oracle(3, 50, 1e-9, nullptr, nullptr, &passed, &worst) == TL_OK);
  CHECK(passed == 1);
  CHECK(worst < 1e-9);

  lines.clear();
  CHECK(tl_variance_study(8, 100, 0, 17, collect, &lines) == TL_OK);
  CHECK(lines.size() == 3);
  CHECK(tl_variance_study(1, 100, 0, 17, collect, &lines) == TL_ERR_ARGUMENT);
}

TEST_CASE("train, load, evaluate and decode") {
  const fs::path dir = fs::temp_directory_path() / "translab_capi";
  fs::remove_all(dir);
  tl_config *c = nullptr;
  REQUIRE(tl_config_create(&c) == TL_OK);
  for (const char *kv : {"run_id=capi", "train.steps=20", "train.eval_interval=10",
                         "train.eval_size=4", "train.batch=2", "encoder.layers=1"})
    REQUIRE(tl_config_set(c, kv) == TL_OK);
  tl_train_summary summary{};
  std::vector<std::string> records;
  REQUIRE(tl_train(c, dir.string().c_str(), collect, &records, &summary) == TL_OK);
  CHECK(summary.steps == 20);
  CHECK(records.size() == 22);
  tl_config_destroy(c);

  tl_model *m = nullptr;
  CHECK(tl_model_load((dir / "missing.ckpt").string().c_str(), &m) == TL_ERR_IO);
  REQUIRE(tl_model_load((dir / "capi.ckpt").string().c_str(), &m) == TL_OK);
  size_t dim = 0;
  REQUIRE(tl_model_feature_dim(m, &dim) == TL_OK);
  CHECK(dim == 16);

  tl_eval_summary e{};
  REQUIRE(tl_model_evaluate(m, 0, 0, 2, nullptr, nullptr, &e) == TL_OK);
  CHECK(e.utterances == 4);
  CHECK(e.mean_loss == summary.final_eval_loss);
  CHECK(e.token_error_rate == summary.final_token_error_rate);

  std::vector<double> features(12 * dim, 0.25);
  std::vector<int> tokens(64);
  size_t count = 0;
  REQUIRE(tl_model_decode(m, features.data(), 12, dim, tokens.data(), tokens.size(), &count) ==
          TL_OK);
  CHECK(count <= 5 * 3);
  CHECK(tl_model_decode(m, features.data(), 12, dim + 1, tokens.data(), tokens.size(), &count) ==
        TL_ERR_DIMENSION);
  CHECK(tl_model_decode(m, features.data(), 2, dim, tokens.data(), tokens.size(), &count) ==
        TL_ERR_INPUT);
  tl_model_destroy(m);
}
