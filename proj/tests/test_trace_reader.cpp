/*
 * Copyright 2026 The avwork Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <sstream>

#include "avwork/trace_reader.hpp"
#include "oracles.hpp"

using namespace avwork;

namespace {

std::vector<TraceSample> parse_fcd(const std::string& text) {
  std::istringstream in(text);
  FcdReader r(in, "mem.xml");
  return drain(r);
}

std::vector<TraceSample> parse_csv(const std::string& text) {
  std::istringstream in(text);
  CsvTraceReader r(in, "mem.csv");
  return drain(r);
}

template <class F>
ParseError expect_parse_error(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ParseError";
  return ParseError("", 0, 0, "");
}

}  // namespace

TEST(FcdReader, SingleRecord) {
  const auto s = parse_fcd(R"(<fcd-export><timestep time="0.0"><vehicle id="v1" x="10" y="20" speed="5"/></timestep></fcd-export>)");
  ASSERT_EQ(s.size(), 1U);
  EXPECT_EQ(s[0], (TraceSample{"v1", 0.0, 10.0, 20.0, 5.0}));
}

TEST(FcdReader, EmptyTimestepYieldsNothing) {
  EXPECT_TRUE(parse_fcd(R"(<fcd-export><timestep time="0.0"></timestep><timestep time="1.0"/></fcd-export>)").empty());
  const auto s = parse_fcd(
      R"(<fcd-export><timestep time="0"/><timestep time="1"><vehicle id="a" x="1" y="2"/></timestep></fcd-export>)");
  ASSERT_EQ(s.size(), 1U);
  EXPECT_EQ(s[0].time_s, 1.0);
  EXPECT_FALSE(s[0].speed_mps.has_value());
}

TEST(FcdReader, ThreeStepFixture) {
  TraceFile f(oracle::data_path("fcd_3step.xml"));
  const auto s = drain(f);
  ASSERT_EQ(s.size(), 6U);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LE(s[i - 1].time_s, s[i].time_s);
  EXPECT_EQ(s[3], (TraceSample{"v2", 1.0, 300.0, 42.5, 2.5}));
}

TEST(FcdReader, MatchesCsvTwin) {
  TraceFile xml(oracle::data_path("fcd_3step.xml"));
  TraceFile csv(oracle::data_path("fcd_3step.csv"));
  EXPECT_EQ(drain(xml), drain(csv));
}

TEST(FcdReader, UnknownAttributesAndElementsIgnored) {
  const auto s = parse_fcd(R"(<?xml version="1.0"?>
<!DOCTYPE fcd-export>
<fcd-export version="1.2">
  <!-- comment with <vehicle id="ghost" x="0" y="0"/> inside -->
  <meta><![CDATA[ <vehicle id="also-ghost"/> ]]></meta>
  <timestep time="3.5" extra='yes'>
    <person id="p0" x="1" y="1"/>
    <vehicle lane="e_0" id="a&amp;b" y="2" x="1" angle="0" slope="0"/>
  </timestep>
</fcd-export>)");
  ASSERT_EQ(s.size(), 1U);
  EXPECT_EQ(s[0].vehicle_id, "a&b");
  EXPECT_EQ(s[0].time_s, 3.5);
  EXPECT_EQ(s[0].x, 1.0);
  EXPECT_EQ(s[0].y, 2.0);
}

TEST(FcdReader, MalformedReportsLine) {
  auto e = expect_parse_error([] { parse_fcd("<fcd-export>\n<timestep time=\"0\">\n<vehicle id=\"v\" x=\"abc\" y=\"1\"/>\n"); });
  EXPECT_EQ(e.line(), 3U);
  EXPECT_EQ(e.source(), "mem.xml");
  EXPECT_NE(std::string(e.what()).find("mem.xml:3:"), std::string::npos);

  e = expect_parse_error([] { parse_fcd("<fcd-export>\n<timestep time=\"0\">\n<vehicle x=\"1\" y=\"1\"/>"); });
  EXPECT_EQ(e.line(), 3U);

  e = expect_parse_error([] { parse_fcd("<fcd-export>\n<timestep time=\"0\">\n</fcd-export>"); });
  EXPECT_EQ(e.line(), 3U);

  expect_parse_error([] { parse_fcd("<fcd-export><timestep time=\"0\">"); });
  expect_parse_error([] { parse_fcd("<fcd-export><vehicle id=\"v\" x=\"1\" y=\"1\"/></fcd-export>"); });
  expect_parse_error([] { parse_fcd("<fcd-export><timestep><vehicle id=\"v\" x=\"1\" y=\"1\"/></timestep></fcd-export>"); });
  expect_parse_error([] { parse_fcd("<fcd-export><timestep time=\"0\"><vehicle id=\"v\" x=\"1\" y=\"1\""); });
  expect_parse_error([] { parse_fcd("<fcd-export><timestep time=\"0\"><vehicle id=\"v&bogus;\" x=\"1\" y=\"1\"/></timestep></fcd-export>"); });
}

TEST(FcdReader, RejectsTimeGoingBackwards) {
  auto e = expect_parse_error([] {
    parse_fcd("<fcd-export>\n<timestep time=\"5\"><vehicle id=\"v\" x=\"1\" y=\"1\"/></timestep>\n"
              "<timestep time=\"4\"><vehicle id=\"v\" x=\"1\" y=\"1\"/></timestep>\n</fcd-export>");
  });
  EXPECT_EQ(e.line(), 3U);
}

TEST(CsvTraceReader, ParsesRowsAndOptionalSpeed) {
  const auto s = parse_csv("time_s,vehicle_id,x,y,speed_mps\r\n0,\"v,1\",1.5,2,\r\n1,v2,3,4,7\r\n\r\n");
  ASSERT_EQ(s.size(), 2U);
  EXPECT_EQ(s[0], (TraceSample{"v,1", 0.0, 1.5, 2.0, std::nullopt}));
  EXPECT_EQ(s[1], (TraceSample{"v2", 1.0, 3.0, 4.0, 7.0}));
}

TEST(CsvTraceReader, Errors) {
  EXPECT_EQ(expect_parse_error([] { parse_csv("t,id,x,y\n"); }).line(), 1U);
  expect_parse_error([] { parse_csv(""); });
  auto e = expect_parse_error([] { parse_csv("time_s,vehicle_id,x,y,speed_mps\n0,v,1,2,3\n1,v,nan,2,3\n"); });
  EXPECT_EQ(e.line(), 3U);
  EXPECT_EQ(e.column(), 3U);
  EXPECT_EQ(expect_parse_error([] { parse_csv("time_s,vehicle_id,x,y,speed_mps\n0,v,1,2\n"); }).line(), 2U);
  expect_parse_error([] { parse_csv("time_s,vehicle_id,x,y,speed_mps\n-1,v,1,2,3\n"); });
  expect_parse_error([] { parse_csv("time_s,vehicle_id,x,y,speed_mps\n0,,1,2,3\n"); });
  expect_parse_error([] { parse_csv("time_s,vehicle_id,x,y,speed_mps\n0,\"v,1,2,3\n"); });
  expect_parse_error([] { parse_csv("time_s,vehicle_id,x,y,speed_mps\n5,v,1,2,3\n4,v,1,2,3\n"); });
}

TEST(TraceFile, MissingFileIsIoError) {
  EXPECT_THROW(TraceFile("/nonexistent/trace.csv"), IoError);
}
