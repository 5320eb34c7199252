#include "qintent/synthetic.hpp"

#include <array>
#include <random>
#include <string_view>

#include "qintent/rng.hpp"

namespace qintent {

namespace {

using Words = std::vector<std::string_view>;

const Words kTopics = {"photosynthesis", "black holes", "the roman empire", "inflation",
                       "climate change", "volcanoes", "tax brackets", "vitamin d",
                       "quantum computing", "the french revolution", "tides", "diabetes",
                       "compound interest", "jazz music", "coral reefs", "the immune system",
                       "machine learning", "blood pressure", "the moon landing", "earthquakes"};
const Words kTasks = {"tie a tie", "boil an egg", "change a tire", "write a cover letter",
                      "lower cholesterol", "grow tomatoes", "fix a leaky faucet",
                      "train a puppy", "learn spanish", "meditate", "solve a rubiks cube",
                      "paint a room", "bake sourdough bread", "jump start a car"};
const Words kBrands = {"facebook", "youtube", "gmail", "netflix", "amazon", "wellsfargo",
                       "chase bank", "delta airlines", "ups tracking", "irs", "craigslist",
                       "walmart", "target", "bestbuy", "espn", "weather channel", "hulu",
                       "spotify", "linkedin", "dropbox"};
const Words kDomains = {"cnn", "bbc", "nytimes", "imdb", "ikea", "etsy", "zillow", "indeed",
                        "expedia", "nasa", "quora", "ebay"};
const Words kProducts = {"running shoes", "iphone 15", "gaming laptop", "office chair",
                         "air fryer", "winter jacket", "car insurance", "concert tickets",
                         "wireless earbuds", "garden hose", "mattress", "coffee maker",
                         "electric toothbrush", "baby stroller"};
const Words kSoftware = {"vlc player", "zoom", "minecraft", "adobe reader", "python",
                         "chrome", "steam", "spotify app", "photoshop", "whatsapp",
                         "libreoffice", "firefox"};
const Words kShows = {"the office", "stranger things", "football highlights", "nba games",
                      "anime movies", "bbc news live", "cooking shows", "nature documentaries"};

std::string_view pick(const Words& w, std::mt19937_64& rng) {
  return w[uniform_below(rng, w.size())];
}

std::string join(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (auto p : parts) out += p;
  return out;
}

std::string informational(std::mt19937_64& rng) {
  switch (uniform_below(rng, 9)) {
    case 0: return join({"how to ", pick(kTasks, rng)});
    case 1: return join({"what is ", pick(kTopics, rng)});
    case 2: return join({pick(kTopics, rng), " definition"});
    case 3: return join({"why is ", pick(kTopics, rng), " important"});
    case 4: return join({pick(kTopics, rng), " facts"});
    case 5: return join({pick(kTopics, rng), " vs ", pick(kTopics, rng)});
    case 6: return join({"history of ", pick(kTopics, rng)});
    case 7: return join({"when did ", pick(kTopics, rng), " start"});
    default: return join({"symptoms of ", pick(kTopics, rng)});
  }
}

std::string navigational(std::mt19937_64& rng) {
  switch (uniform_below(rng, 7)) {
    case 0: return join({pick(kBrands, rng), " login"});
    case 1: return join({pick(kBrands, rng), " official site"});
    case 2: return join({"www.", pick(kDomains, rng), ".com"});
    case 3: return join({pick(kDomains, rng), ".com"});
    case 4: return join({pick(kBrands, rng), " homepage"});
    case 5: return join({pick(kBrands, rng), " sign in"});
    default: return join({pick(kDomains, rng), " website"});
  }
}

std::string transactional(std::mt19937_64& rng) {
  switch (uniform_below(rng, 8)) {
    case 0: return join({"buy ", pick(kProducts, rng)});
    case 1: return join({"download ", pick(kSoftware, rng)});
    case 2: return join({pick(kProducts, rng), " for sale"});
    case 3: return join({"cheap ", pick(kProducts, rng)});
    case 4: return join({"watch ", pick(kShows, rng), " online"});
    case 5: return join({"install ", pick(kSoftware, rng)});
    case 6: return join({pick(kSoftware, rng), " free download"});
    default: return join({pick(kProducts, rng), " coupon"});
  }
}

}  // namespace

std::vector<SyntheticQuery> synthetic_queries(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 0x5e));
  std::vector<SyntheticQuery> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = kAllLabels[i % kNumLabels];
    std::string text;
    switch (label) {
      case IntentLabel::Informational: text = informational(rng); break;
      case IntentLabel::Navigational: text = navigational(rng); break;
      case IntentLabel::Transactional: text = transactional(rng); break;
    }
    out.push_back({"syn" + std::to_string(seed) + "-" + std::to_string(i), std::move(text), label});
  }
  return out;
}

}  // namespace qintent
