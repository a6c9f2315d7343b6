// Copyright 2026 The AnonRAG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "anonrag/clients.h"
#include "anonrag/errors.h"
#include "anonrag/metrics.h"
#include "anonrag/mocks.h"
#include "anonrag/rag.h"

namespace anonrag {
namespace {

class EndpointTest : public ::testing::Test {
 protected:
  void SetUp() override { server_.Start(); }
  void TearDown() override { server_.Stop(); }

  EndpointConfig Config(const std::string& path = "/v1") const {
    EndpointConfig c;
    c.base_url = server_.base_url() + path;
    c.model = "mock-model";
    c.api_key = "test-key";
    c.retry.initial_backoff = std::chrono::milliseconds(1);
    c.timeout = std::chrono::seconds(10);
    return c;
  }

  MockGenerationClient gen_;
  HashEmbeddingClient embed_;
  MockRewriterClient rewriter_;
  UnigramNllScorer scorer_{{"a a a"}};
  MockEndpointServer server_{gen_, embed_, rewriter_, &scorer_};
};

TEST_F(EndpointTest, ChatCompletionRoundTrip) {
  OpenAiGenerationClient client(Config());
  EXPECT_EQ(client.Complete("Paraphrase the following document: hi there",
                            0.5),
            "hi there");
  ASSERT_EQ(gen_.request_count(), 1u);
  EXPECT_DOUBLE_EQ(gen_.requests()[0].temperature, 0.5);
}

TEST_F(EndpointTest, EmbeddingsMatchLocalMock) {
  OpenAiEmbeddingClient client(Config(), 2);
  std::vector<std::string> texts = {"one", "two words", "three more words"};
  auto remote = client.Embed(texts);
  auto local = embed_.Embed(texts);
  ASSERT_EQ(remote.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    ASSERT_EQ(remote[i].size(), local[i].size());
    for (std::size_t k = 0; k < local[i].size(); ++k) {
      EXPECT_NEAR(remote[i][k], local[i][k], 1e-12);
    }
  }
}

TEST_F(EndpointTest, RetriesTransientFailures) {
  server_.FailNext(2);
  OpenAiGenerationClient client(Config());
  EXPECT_EQ(client.Complete("Paraphrase the following document: ok", 1.0),
            "ok");
  EXPECT_EQ(server_.hits(), 3);
}

TEST_F(EndpointTest, ExhaustedRetriesRaiseTransportError) {
  server_.FailNext(10);
  OpenAiGenerationClient client(Config());
  try {
    client.Complete("x", 0);
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_EQ(e.attempts(), 3);
  }
  EXPECT_EQ(server_.hits(), 3);
}

TEST_F(EndpointTest, ClientErrorIsNotRetried) {
  EndpointConfig c = Config("/nowhere");
  OpenAiGenerationClient client(c);
  EXPECT_THROW(client.Complete("x", 0), TransportError);
  EXPECT_EQ(server_.hits(), 0);
}

TEST_F(EndpointTest, UnreachableHost) {
  EndpointConfig c = Config();
  c.base_url = "http://127.0.0.1:1/v1";
  c.retry.max_attempts = 2;
  OpenAiGenerationClient client(c);
  try {
    client.Complete("x", 0);
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_EQ(e.attempts(), 2);
  }
}

TEST_F(EndpointTest, FailedEmbeddingBatchReportsIndices) {
  EndpointConfig c = Config();
  c.retry.max_attempts = 1;
  OpenAiEmbeddingClient client(c, 2);
  server_.FailNext(1);
  try {
    client.Embed({"a", "b", "c", "d"});
    FAIL();
  } catch (const EmbeddingError& e) {
    EXPECT_EQ(e.failed_indices(), (std::vector<std::size_t>{0, 1}));
  }
}

TEST_F(EndpointTest, RewriterContract) {
  HttpRewriterClient client(Config("/rewrite"));
  EXPECT_EQ(client.Rewrite("alpha beta", 1e9), "alpha beta");
}

TEST_F(EndpointTest, NllContract) {
  HttpNllScorer client(Config("/nll"));
  NllResult r = client.Score("a");
  EXPECT_EQ(r.token_count, 1);
  EXPECT_NEAR(Perplexity("a", client), 1.25, 1e-9);
}

TEST(RetryPolicyTest, ExponentialBackoff) {
  RetryPolicy p;
  EXPECT_EQ(p.BackoffBefore(2).count(), 1000);
  EXPECT_EQ(p.BackoffBefore(3).count(), 2000);
}

TEST(LimiterTest, NeverExceedsLimit) {
  ConcurrencyLimiter limiter(3);
  std::vector<std::thread> threads;
  for (int i = 0; i < 12; ++i) {
    threads.emplace_back([&] {
      ConcurrencyLimiter::Slot slot(limiter);
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE(limiter.peak(), 3u);
  EXPECT_GE(limiter.peak(), 1u);
}

}  // namespace
}  // namespace anonrag
