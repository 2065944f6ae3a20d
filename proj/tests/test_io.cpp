#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "escphase/io.hpp"
#include "support.hpp"

using namespace escphase;
using testing_support::code_of;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("escphase_io_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

}  // namespace

TEST_CASE("series CSV") {
  TempDir dir;
  SUBCASE("with a time column") {
    const auto ts = io::read_series_csv(dir.write("a.csv", "t,force\n0,1.5\n0.01,2.5\n0.02,3\n"), {}, "ST1", "2");
    CHECK(ts.size() == 3);
    CHECK(ts.dt() == doctest::Approx(0.01));
    CHECK(ts.samples()[2] == 3.0);
    CHECK(ts.subject_id() == "ST1");
  }
  SUBCASE("force only") {
    const auto path = dir.write("b.csv", "Force\n1\n2\n");
    CHECK(io::read_series_csv(path, 0.02).dt() == 0.02);
    CHECK(code_of([&] { io::read_series_csv(path); }) == ErrorCode::InvalidInput);
  }
  SUBCASE("errors") {
    CHECK(code_of([&] { io::read_series_csv(dir.path / "missing.csv"); }) == ErrorCode::Io);
    CHECK(code_of([&] { io::read_series_csv(dir.write("c.csv", "t,x\n0,1\n")); }) == ErrorCode::InvalidInput);
    CHECK(code_of([&] { io::read_series_csv(dir.write("d.csv", "t,force\n0,1\n0.01,2\n0.05,3\n")); }) ==
          ErrorCode::InvalidInput);
    CHECK(code_of([&] { io::read_series_csv(dir.write("e.csv", "t,force\n0,abc\n")); }) == ErrorCode::InvalidInput);
    CHECK(code_of([&] { io::read_series_csv(dir.write("f.csv", "t,force\n0,1,2\n")); }) == ErrorCode::InvalidInput);
    CHECK(code_of([&] { io::read_series_csv(dir.write("g.csv", "")); }) == ErrorCode::InvalidInput);
  }
  SUBCASE("round trip") {
    const std::vector<double> t{0.0, 0.01, 0.02}, f{0.1, -1.0 / 3.0, 2e-17};
    io::write_series_csv(dir.path / "rt.csv", t, f);
    const auto ts = io::read_series_csv(dir.path / "rt.csv");
    CHECK(std::vector<double>(ts.samples().begin(), ts.samples().end()) == f);
  }
}

TEST_CASE("event annotations") {
  const auto list = io::Json::parse(R"([{"subject":"ST31","dataset":"1","t_start":1300,"t_end":1980}])");
  const auto events = io::parse_events(list);
  REQUIRE(events.size() == 1);
  CHECK(events[0].label == "ST31_1_1300_1980");
  CHECK(events[0].window().length() == 681);

  const auto wrapped = io::Json::parse(
      R"({"events":[{"subject":"ST18","dataset":1,"t_start":700,"t_end":4250,"label":"A"}]})");
  const auto w = io::parse_events(wrapped);
  CHECK(w[0].dataset == "1");
  CHECK(w[0].label == "A");

  CHECK(code_of([] { io::parse_events(io::Json::parse(R"([{"subject":"x"}])")); }) == ErrorCode::InvalidInput);
  CHECK(code_of([] {
          io::parse_events(io::Json::parse(R"([{"subject":"x","dataset":"1","t_start":5,"t_end":5}])"));
        }) == ErrorCode::InvalidInput);
  CHECK(code_of([] { io::parse_events(io::Json::parse(R"({"x":1})")); }) == ErrorCode::InvalidInput);

  TempDir dir;
  CHECK(io::read_events(dir.write("ev.json", list.dump())) == events);
  CHECK(code_of([&] { io::read_events(dir.write("bad.json", "{not json")); }) == ErrorCode::InvalidInput);
}

TEST_CASE("display precision") {
  CHECK(io::display4(34.41389) == "34.4139");
  CHECK(io::display4(0.99974) == "0.9997");
  CHECK(io::display4(-0.00001) == "-0.0000");
}

TEST_CASE("record documents round trip for cohort use") {
  const TimeSeries ts(testing_support::stepping_then_freezing(15.0, 6.0, 4), 0.01, "SYN", "1");
  const EventSpec ev{"SYN", "1", 0, ts.size() - 1, "e"};
  const auto rec = analyze_event(ts, ev, 0.1, 10.0);
  REQUIRE(rec.ok());
  const AnalysisRecord recs[] = {rec};
  const auto doc = io::records_document(recs);
  CHECK(doc.at("schema_version") == io::kSchemaVersion);
  CHECK(doc.at("records")[0].at("escape").at("display").at("met_F_s") == io::display4(rec.escape->met_f));

  TempDir dir;
  io::write_json(dir.path / "r.json", doc);
  const auto back = io::parse_records(io::load_json(dir.path / "r.json"));
  REQUIRE(back.size() == 1);
  CHECK(back[0].events == rec.events);
  CHECK(back[0].status == Status::Ok);
  CHECK(back[0].escape->psi_min_degrees == rec.escape->psi_min_degrees);
  CHECK(back[0].escape->met_f == rec.escape->met_f);

  const auto single = io::parse_records(io::to_json(rec));
  CHECK(single.size() == 1);

  auto wrong = doc;
  wrong["schema_version"] = "9.9";
  CHECK(code_of([&] { io::parse_records(wrong); }) == ErrorCode::InvalidInput);

  const auto csv = io::records_csv(recs);
  CHECK(csv.rfind("subject,dataset,label,t_start,t_end,p,q_degrees,status", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

  const auto cohort = cohort_summary(recs);
  CHECK(io::to_json(cohort).contains("subjects"));
  CHECK(io::cohort_csv(cohort).find("SYN,1,e,ok") != std::string::npos);
}

TEST_CASE("model and decomposition JSON") {
  const auto model = testing_support::model_from_counts({{1, 1, 0}, {1, 0, 1}, {0, 0, 0}});
  const auto mj = io::to_json(model);
  CHECK(mj.at("dangling") == io::Json::array({3}));
  const auto dec = split_transition_absorbing(model);
  const auto dj = io::to_json(dec, model);
  CHECK(dj.at("absorbing_set") == io::Json::array({3}));
  CHECK(dj.at("transition_set") == io::Json::array({1, 2}));
  CHECK(dj.at("entry_states").size() == 1);
}
