#include "opaque/synthetic.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

namespace opaque {

namespace {

constexpr std::array<std::string_view, 7> kPlaceholders = {"id", "sn", "gn", "mobile", "postcode", "bool", "count"};

constexpr std::array<std::string_view, 48> kSurnames = {
    "Du",       "Versteeg", "Schneider", "Han",     "Grundy",  "Will",     "Hine",    "Durand",
    "Miao",     "Smith",    "Nguyen",    "Garcia",  "Muller",  "Rossi",    "Kowalski", "Tanaka",
    "Okafor",   "Larsen",   "Petrov",    "Silva",   "Fischer", "Moreau",   "Jensen",  "Novak",
    "Oconnell", "Haddad",   "Ivanova",   "Kim",     "Lopez",   "Brown",    "Wilson",  "Taylor",
    "Anderson", "Thomas",   "Jackson",   "White",   "Harris",  "Martin",   "Thompson", "Robinson",
    "Clarke",   "Walker",   "Young",     "Allen",   "Wright",  "Scott",    "Green",   "Baker"};

constexpr std::array<std::string_view, 32> kGivenNames = {
    "Miao",  "Steve", "Jun",   "John",   "Cam",   "Anna",  "Lena",   "Omar",
    "Priya", "Marco", "Sofia", "Hiro",   "Ines",  "Pavel", "Chloe",  "Noah",
    "Emma",  "Liam",  "Olga",  "Ravi",   "Zoe",   "Felix", "Maya",   "Ahmed",
    "Lucia", "Kenji", "Nora",  "Tomas",  "Elif",  "Jonas", "Amara",  "Wei"};

std::vector<std::string> placeholders_in(const std::string& tmpl) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = tmpl.find("${", pos)) != std::string::npos) {
    const auto end = tmpl.find('}', pos);
    if (end == std::string::npos) throw Error(ErrorCode::UnknownSpec, "unterminated placeholder in " + tmpl);
    out.push_back(tmpl.substr(pos + 2, end - pos - 2));
    pos = end + 1;
  }
  return out;
}

std::string render(const std::string& tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto start = tmpl.find("${", pos);
    if (start == std::string::npos) {
      out.append(tmpl, pos);
      return out;
    }
    out.append(tmpl, pos, start - pos);
    const auto end = tmpl.find('}', start);
    out += values.at(tmpl.substr(start + 2, end - start - 2));
    pos = end + 1;
  }
}

std::string digits(std::mt19937_64& rng, int count) {
  std::uniform_int_distribution<int> d(0, 9);
  std::string s;
  for (int i = 0; i < count; ++i) s.push_back(static_cast<char>('0' + d(rng)));
  if (s.front() == '0') s.front() = '1';
  return s;
}

// Payload placeholders (everything but the id) of an operation, sorted.
std::vector<std::string> payload_fields(const SyntheticOperation& op) {
  std::set<std::string> names;
  for (const auto& t : {op.request_template, op.response_template})
    for (auto& p : placeholders_in(t))
      if (p != "id") names.insert(p);
  return {names.begin(), names.end()};
}

}  // namespace

void SyntheticProtocolSpec::validate() const {
  if (operations.empty()) throw Error(ErrorCode::UnknownSpec, "spec has no operations");
  std::set<std::string> names;
  for (const auto& op : operations) {
    if (!names.insert(op.name).second) throw Error(ErrorCode::UnknownSpec, "duplicate operation " + op.name);
    if (!(op.weight > 0.0)) throw Error(ErrorCode::UnknownSpec, "operation " + op.name + " needs a positive weight");
    if (op.request_template.empty() || op.response_template.empty()) {
      throw Error(ErrorCode::UnknownSpec, "operation " + op.name + " has an empty template");
    }
    for (const auto& t : {op.request_template, op.response_template}) {
      for (const auto& p : placeholders_in(t)) {
        if (std::find(kPlaceholders.begin(), kPlaceholders.end(), p) == kPlaceholders.end()) {
          throw Error(ErrorCode::UnknownSpec, "unknown placeholder ${" + p + "}");
        }
      }
    }
  }
  if (lookalike_rate < 0.0 || lookalike_rate > 1.0) throw Error(ErrorCode::UnknownSpec, "lookalike_rate outside [0, 1]");
}

SyntheticProtocolSpec SyntheticProtocolSpec::from_json(const nlohmann::json& j) {
  SyntheticProtocolSpec spec;
  try {
    spec.name = j.value("name", "custom");
    spec.id_max = j.value("id_max", std::uint64_t{9999});
    spec.lookalike_rate = j.value("lookalike_rate", 0.0);
    for (const auto& o : j.at("operations")) {
      spec.operations.push_back({o.at("name").get<std::string>(), o.at("request").get<std::string>(),
                                 o.at("response").get<std::string>(), o.value("weight", 1.0)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::UnknownSpec, e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json SyntheticProtocolSpec::to_json() const {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : operations) {
    ops.push_back({{"name", op.name}, {"request", op.request_template}, {"response", op.response_template},
                   {"weight", op.weight}});
  }
  return {{"name", name}, {"id_max", id_max}, {"lookalike_rate", lookalike_rate}, {"operations", ops}};
}

SyntheticProtocolSpec directory_spec() {
  SyntheticProtocolSpec spec;
  spec.name = "directory";
  spec.operations = {
      {"search", "{id:${id},op:S,sn:${sn}}",
       "{id:${id},op:SearchRsp,result:Ok,gn:${gn},sn:${sn},mobile:${mobile}}", 0.30},
      {"add", "{id:${id},op:A,sn:${sn},gn:${gn},mobile:${mobile}}", "{id:${id},op:AddRsp,result:Ok}", 0.20},
      {"delete", "{id:${id},op:D,sn:${sn}}", "{id:${id},op:DeleteRsp,result:Ok,removed:${count}}", 0.15},
      {"update", "{id:${id},op:U,sn:${sn},mobile:${mobile}}",
       "{id:${id},op:ModifyRsp,result:Ok,sn:${sn},mobile:${mobile}}", 0.20},
      {"compare", "{id:${id},op:C,sn:${sn},gn:${gn}}", "{id:${id},op:CompareRsp,result:${bool}}", 0.15},
  };
  return spec;
}

SyntheticProtocolSpec payload_confusion_spec(double lookalike_rate) {
  SyntheticProtocolSpec spec;
  spec.name = "confusion";
  spec.lookalike_rate = lookalike_rate;
  spec.operations = {
      {"search", "{id:${id},op:S,sn:${sn},gn:${gn}}",
       "{id:${id},op:SearchRsp,result:Ok,gn:${gn},sn:${sn},mobile:${mobile}}", 0.25},
      {"delete", "{id:${id},op:D,sn:${sn},gn:${gn}}", "{id:${id},op:DeleteRsp,result:Ok,removed:${count}}", 0.25},
      {"add", "{id:${id},op:A,sn:${sn},gn:${gn},mobile:${mobile}}", "{id:${id},op:AddRsp,result:Ok}", 0.25},
      {"update", "{id:${id},op:U,sn:${sn},gn:${gn},mobile:${mobile}}",
       "{id:${id},op:ModifyRsp,result:Ok,sn:${sn},mobile:${mobile}}", 0.25},
  };
  return spec;
}

SyntheticProtocolSpec preset_spec(const std::string& name) {
  if (name == "directory") return directory_spec();
  if (name == "confusion") return payload_confusion_spec();
  throw Error(ErrorCode::UnknownSpec, "unknown preset '" + name + "'");
}

LabeledLibrary synthetic_library(const SyntheticProtocolSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::vector<double> weights;
  for (const auto& op : spec.operations) weights.push_back(op.weight);
  std::discrete_distribution<std::size_t> pick_op(weights.begin(), weights.end());
  const std::uint64_t id_max = std::max<std::uint64_t>(spec.id_max, 10 * static_cast<std::uint64_t>(n));
  std::uniform_int_distribution<std::uint64_t> pick_id(1, id_max);
  std::uniform_int_distribution<std::size_t> pick_sn(0, kSurnames.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_gn(0, kGivenNames.size() - 1);
  std::uniform_int_distribution<int> pick_mobile_len(6, 8);
  std::uniform_int_distribution<int> pick_count(1, 9);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution lookalike(spec.lookalike_rate);

  std::vector<std::vector<std::string>> fields;
  for (const auto& op : spec.operations) fields.push_back(payload_fields(op));

  // Earlier payloads, by operation position.
  std::vector<std::vector<std::map<std::string, std::string>>> history(spec.operations.size());

  LabeledLibrary out;
  std::unordered_set<std::uint64_t> used_ids;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t op = pick_op(rng);
    std::uint64_t id;
    do {
      id = pick_id(rng);
    } while (!used_ids.insert(id).second);

    std::map<std::string, std::string> values;
    values["sn"] = std::string(kSurnames[pick_sn(rng)]);
    values["gn"] = std::string(kGivenNames[pick_gn(rng)]);
    values["mobile"] = digits(rng, pick_mobile_len(rng));
    values["postcode"] = digits(rng, 5);
    values["bool"] = coin(rng) ? "True" : "False";
    values["count"] = std::to_string(pick_count(rng));

    if (lookalike(rng)) {
      // Borrow the whole payload of an earlier transaction of another
      // operation with the same payload fields.
      std::vector<const std::map<std::string, std::string>*> donors;
      for (std::size_t other = 0; other < spec.operations.size(); ++other) {
        if (other == op || fields[other] != fields[op]) continue;
        for (const auto& h : history[other]) donors.push_back(&h);
      }
      if (!donors.empty()) {
        std::uniform_int_distribution<std::size_t> pick_donor(0, donors.size() - 1);
        const auto& donor = *donors[pick_donor(rng)];
        for (const auto& [k, v] : donor) values[k] = v;
      }
    }
    values["id"] = std::to_string(id);
    const auto& operation = spec.operations[op];
    out.library.add(Transaction{i, to_bytes(render(operation.request_template, values)),
                                to_bytes(render(operation.response_template, values))});
    out.labels.push_back(operation.name);
    auto payload = values;
    payload.erase("id");
    history[op].push_back(std::move(payload));
  }
  return out;
}

LabeledLibrary directory_example_library() {
  struct Row {
    TransactionIndex index;
    const char* request;
    const char* response;
    const char* label;
  };
  static constexpr Row kRows[] = {
      {1, "{id:1,op:S,sn:Du}", "{id:1,op:SearchRsp,result:Ok,gn:Miao,sn:Du,mobile:5362634}", "search"},
      {13, "{id:13,op:S,sn:Versteeg}", "{id:13,op:SearchRsp,result:Ok,gn:Steve,sn:Versteeg,mobile:9374723}",
       "search"},
      {24, "{id:24,op:A,sn:Schneider,mobile:123456}", "{id:24,op:AddRsp,result:Ok}", "add"},
      {275, "{id:275,op:S,sn:Han}", "{id:275,op:SearchRsp,result:Ok,gn:Jun,sn:Han,mobile:33333333}", "search"},
      {490, "{id:490,op:S,sn:Grundy}", "{id:490,op:SearchRsp,result:Ok,gn:John,sn:Grundy,mobile:44444444}",
       "search"},
      {2273, "{id:2273,op:S,sn:Schneider}", "{id:2273,op:SearchRsp,result:Ok,sn:Schneider,mobile:123456}",
       "search"},
      {2487, "{id:2487,op:A,sn:Will}", "{id:2487,op:AddRsp,result:Ok}", "add"},
      {3106, "{id:3106,op:A,sn:Hine,gn:Cam,Postcode:33589}", "{id:3106,op:AddRsp,result:Ok}", "add"},
  };
  LabeledLibrary out;
  for (const auto& r : kRows) {
    out.library.add(Transaction{r.index, to_bytes(r.request), to_bytes(r.response)});
    out.labels.emplace_back(r.label);
  }
  return out;
}

}  // namespace opaque
