// Writes the bundled 20-object home scenario: walkthrough.json,
// batches.jsonl and scenario.json. Output depends only on --seed.

#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "common/rng.hpp"
#include "common/time.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kDim = 64;

const std::vector<std::string> kRooms = {"kitchen", "hall", "living room", "study", "bedroom", "bathroom"};
const std::vector<std::string> kTour = {"kitchen", "hall", "living room", "hall", "study", "hall", "bedroom", "bathroom"};

// How the assistant's view of a placement goes wrong, if at all.
enum class Flaw { None, WrongRoom, Mislabel, Unseen };

struct Placement {
  std::string object;
  std::string room;
  std::string background;
  std::string verb;
  Flaw flaw = Flaw::None;
  std::string seen_as;     // Mislabel: what the model called it
  std::string drift_room;  // WrongRoom: where the frame looks like
  std::string query;
};

const std::vector<Placement> kPlacements = {
    {"folder", "study", "wooden desk with lamp", "putting the folder on the desk", Flaw::None, "", "", "Pal, where is my folder?"},
    {"cup", "kitchen", "marble counter", "setting the cup on the counter", Flaw::None, "", "", "Pal, where is my cup?"},
    {"phone", "living room", "grey sofa", "leaving the phone on the sofa", Flaw::None, "", "", "I can't find my phone, Pal."},
    {"bottle", "kitchen", "fridge door", "putting the bottle in the fridge door", Flaw::None, "", "", "Pal, where's my bottle?"},
    {"medication", "bathroom", "mirror cabinet", "putting the medication in the cabinet", Flaw::Mislabel, "vitamins", "",
     "Pal, where did I put my medication?"},
    {"glasses", "bedroom", "nightstand", "setting the glasses on the nightstand", Flaw::Mislabel, "sunglasses", "",
     "Pal, where are my glasses?"},
    {"headphones", "study", "bookshelf", "hanging the headphones on the bookshelf", Flaw::None, "", "",
     "Pal, where are my headphones?"},
    {"book", "living room", "coffee table", "placing the book on the coffee table", Flaw::None, "", "",
     "Pal, where is the book?"},
    {"charger", "bedroom", "dresser", "plugging the charger in by the dresser", Flaw::None, "", "",
     "I'm looking for my charger, Pal."},
    {"remote", "living room", "tv stand", "putting the remote on the tv stand", Flaw::Mislabel, "controller", "",
     "Pal, where is the remote?"},
    {"id card", "hall", "shoe rack", "leaving the id card on the shoe rack", Flaw::None, "", "", "Pal, where is my ID card?"},
    {"ring", "bathroom", "sink", "taking off the ring by the sink", Flaw::Unseen, "", "", "Pal, where's my ring?"},
    {"wallet", "hall", "coat hooks", "tucking the wallet into a coat on the hooks", Flaw::None, "", "",
     "I can't find my wallet, Pal."},
    {"watch", "bedroom", "nightstand", "putting the watch on the nightstand", Flaw::WrongRoom, "", "bathroom",
     "Pal, where is my watch?"},
    {"magnifying glass", "study", "wooden desk with lamp", "leaving the magnifying glass on the desk", Flaw::None, "", "",
     "Pal, where is my magnifying glass?"},
    {"tape", "study", "filing cabinet", "dropping the tape on the filing cabinet", Flaw::WrongRoom, "", "hall",
     "Pal, where is the tape?"},
    {"scissors", "kitchen", "drawer", "putting the scissors in the drawer", Flaw::None, "", "", "Pal, where are the scissors?"},
    {"ruler", "study", "bookshelf", "sliding the ruler onto the bookshelf", Flaw::None, "", "", "Pal, where is my ruler?"},
    {"mouse", "study", "wooden desk with lamp", "setting the mouse next to the laptop", Flaw::None, "", "",
     "Pal, where is my mouse?"},
    {"keys", "hall", "side table with key bowl", "dropping the keys in the key bowl", Flaw::None, "", "",
     "Pal, where are my keys?"},
};

// Things done along the way that leave no trace on the 20 objects.
const std::map<std::string, std::vector<std::pair<std::string, std::string>>> kChores = {
    {"kitchen", {{"washing a plate", "plate"}, {"wiping the counter", "sponge"}}},
    {"hall", {{"hanging up a scarf", "scarf"}}},
    {"living room", {{"folding a blanket", "blanket"}, {"watering a plant", "watering can"}}},
    {"study", {{"writing a note", "pen"}}},
    {"bedroom", {{"making the bed", "pillow"}}},
    {"bathroom", {{"hanging a towel", "towel"}}},
};

const std::map<std::string, std::string> kScenery = {
    {"kitchen", "marble counter"},   {"hall", "coat hooks"},      {"living room", "grey sofa"},
    {"study", "wooden desk with lamp"}, {"bedroom", "nightstand"}, {"bathroom", "sink"},
};

double round6(double x) { return std::round(x * 1e6) / 1e6; }

class Home {
 public:
  explicit Home(std::uint64_t seed) : rng_(seed) {
    for (const auto& r : kRooms) proto_[r] = unit(gaussian());
    for (std::size_t i = 0; i + 1 < kTour.size(); ++i) {
      adj_[kTour[i]].insert(kTour[i + 1]);
      adj_[kTour[i + 1]].insert(kTour[i]);
    }
  }

  // A frame seen in `room`: its prototype plus camera noise.
  json frame(const std::string& room, double noise = 0.6) {
    auto g = gaussian();
    std::vector<double> v(kDim);
    const auto& p = proto_.at(room);
    for (std::size_t i = 0; i < kDim; ++i) v[i] = p[i] + noise * g[i] / std::sqrt(static_cast<double>(kDim));
    v = unit(v);
    json out = json::array();
    for (double x : v) out.push_back(round6(x));
    return out;
  }

  // A frame halfway between two rooms, nearer `toward`.
  json blended(const std::string& room, const std::string& toward) {
    std::vector<double> v(kDim);
    const auto& a = proto_.at(room);
    const auto& b = proto_.at(toward);
    auto g = gaussian();
    for (std::size_t i = 0; i < kDim; ++i) v[i] = 0.35 * a[i] + 0.9 * b[i] + 0.2 * g[i] / std::sqrt(static_cast<double>(kDim));
    v = unit(v);
    json out = json::array();
    for (double x : v) out.push_back(round6(x));
    return out;
  }

  // Rooms passed through from `from` to `to`, both ends included.
  std::vector<std::string> route(const std::string& from, const std::string& to) const {
    std::map<std::string, std::string> parent{{from, from}};
    std::deque<std::string> q{from};
    while (!q.empty()) {
      auto cur = q.front();
      q.pop_front();
      if (cur == to) break;
      for (const auto& n : adj_.at(cur)) {
        if (!parent.count(n)) {
          parent[n] = cur;
          q.push_back(n);
        }
      }
    }
    std::vector<std::string> path{to};
    while (path.back() != from) path.push_back(parent.at(path.back()));
    return {path.rbegin(), path.rend()};
  }

  mempal::Rng& rng() { return rng_; }

 private:
  std::vector<double> gaussian() {
    std::vector<double> g(kDim);
    for (auto& x : g) x = rng_.normal();
    return g;
  }
  static std::vector<double> unit(std::vector<double> v) {
    double n = 0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (auto& x : v) x /= n;
    return v;
  }

  mempal::Rng rng_;
  std::map<std::string, std::vector<double>> proto_;
  std::map<std::string, std::set<std::string>> adj_;
};

json vlm(const std::string& activity, const std::vector<std::string>& objects, const std::string& background) {
  return {{"activity", activity}, {"objects", objects}, {"background", background}};
}

void write(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the bundled 20-object replay scenario"};
  std::string out_dir = "data/scenarios/home20";
  std::uint64_t seed = 7;
  double cadence = 5.0;
  app.add_option("-o,--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--cadence", cadence, "Seconds between frame batches");
  CLI11_PARSE(app, argc, argv);

  Home home(seed);
  const auto start = mempal::parse_rfc3339("2024-05-14T09:00:00Z");
  auto at = [&](double s) { return mempal::format_rfc3339(start + std::chrono::milliseconds(std::llround(s * 1000))); };

  // House tour: 30 frames a second apart per stop.
  json walk = {{"frames", json::array()}, {"labels", json::array()}};
  double t = 0;
  for (const auto& room : kTour) {
    walk["labels"].push_back({{"t", at(t)}, {"label", room}});
    for (int i = 0; i < 30; ++i) {
      walk["frames"].push_back({{"t", at(t)}, {"embedding", home.frame(room)}});
      t += 1.0;
    }
  }

  // The day: walk to where each object is picked up, then to where it goes.
  std::vector<json> batches;
  std::vector<json> trials;
  t = 3600.0;
  int n = 0;
  std::string here = "kitchen";
  auto batch = [&](const std::string& room, bool hands, const json& reply, const json* embedding = nullptr) {
    json b = {{"batch_id", "b" + std::to_string(++n)}, {"t", at(t)}, {"hands", hands}};
    b["embeddings"] = json::array({embedding ? *embedding : home.frame(room), home.frame(room)});
    if (!reply.is_null()) b["vlm"] = reply;
    batches.push_back(b);
    t += cadence;
    return b["batch_id"].get<std::string>();
  };
  auto walk_to = [&](const std::string& to) {
    for (const auto& r : home.route(here, to)) {
      const int steps = 1 + static_cast<int>(home.rng().index(2));
      for (int i = 0; i < steps; ++i) batch(r, false, nullptr);
    }
    here = to;
  };

  for (std::size_t i = 0; i < kPlacements.size(); ++i) {
    const auto& p = kPlacements[i];
    // Pick the object up somewhere else first (the earlier sighting).
    const std::string& origin = kRooms[(i * 5 + 2) % kRooms.size()] == p.room ? kRooms[(i * 5 + 3) % kRooms.size()]
                                                                              : kRooms[(i * 5 + 2) % kRooms.size()];
    walk_to(origin);
    const auto& chores = kChores.at(origin);
    const auto& chore = chores[i % chores.size()];
    batch(origin, true, vlm(chore.first, {chore.second}, kScenery.at(origin)));
    const bool seen_before = p.flaw != Flaw::Unseen;
    batch(origin, true,
          vlm("picking up the " + p.object, seen_before ? std::vector<std::string>{p.object} : std::vector<std::string>{},
              kScenery.at(origin)));

    walk_to(p.room);
    json reply;
    switch (p.flaw) {
      case Flaw::None:
      case Flaw::WrongRoom: reply = vlm(p.verb, {p.object}, p.background); break;
      case Flaw::Mislabel: reply = vlm(p.verb.substr(0, p.verb.find(p.object)) + p.seen_as +
                                           p.verb.substr(p.verb.find(p.object) + p.object.size()),
                                       {p.seen_as}, p.background);
        break;
      case Flaw::Unseen: reply = vlm("reaching toward the " + p.background, {}, p.background); break;
    }
    const double placed_s = t;
    std::string placed_batch;
    if (p.flaw == Flaw::WrongRoom) {
      const json drift = home.blended(p.room, p.drift_room);
      placed_batch = batch(p.room, true, reply, &drift);
    } else {
      placed_batch = batch(p.room, true, reply);
    }
    batch(p.room, false, nullptr);

    for (const char* condition : {"mempal", "visual", "baseline"}) {
      json trial = {{"id", std::string(condition) + "-" + std::to_string(i + 1)},
                    {"object", p.object},
                    {"truth_location", p.room},
                    {"truth_background", p.background},
                    {"condition", condition},
                    {"placed_at", at(placed_s)}};
      if (std::string(condition) == "mempal") trial["query"] = p.query;
      trials.push_back(trial);
    }
  }

  json objects = json::array();
  for (const auto& p : kPlacements) objects.push_back(p.object);
  json scenario = {
      {"name", "home20"},
      {"seed", seed},
      {"participants", 15},
      {"utc_offset_minutes", 0},
      {"home", {{"walkthrough", "walkthrough.json"}}},
      {"batches", "batches.jsonl"},
      {"objects", objects},
      {"trials", trials},
      {"latency",
       {{"preprocess", {{"mean_s", 0.05}, {"sd_s", 0.02}}},
        {"image_embedder", {{"mean_s", 0.429}, {"sd_s", 0.328}}},
        {"text_embedder", {{"mean_s", 0.0}, {"sd_s", 0.0}}},
        {"vlm", {{"mean_s", 5.21}, {"sd_s", 1.9}}},
        {"llm", {{"mean_s", 2.0}, {"sd_s", 0.6}}}}},
  };

  fs::create_directories(out_dir);
  write(fs::path(out_dir) / "walkthrough.json", walk.dump() + "\n");
  std::string lines;
  for (const auto& b : batches) lines += b.dump() + "\n";
  write(fs::path(out_dir) / "batches.jsonl", lines);
  write(fs::path(out_dir) / "scenario.json", scenario.dump(2) + "\n");
  std::printf("wrote %zu batches, %zu trials to %s\n", batches.size(), trials.size(), out_dir.c_str());
  return 0;
}
