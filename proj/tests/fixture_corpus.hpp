#pragma once

// Shared desk-scale covertext fixture used across the unit and acceptance
// suites. Sentences reuse a compact vocabulary so the bigram model has real
// branching structure at every step.

#include <string>
#include <vector>

#include "lmstego/digest.hpp"
#include "lmstego/provider.hpp"

namespace fixture {

inline const std::vector<std::string>& sentences() {
  static const std::vector<std::string> s = {
      "the film starts slowly but builds into a strong story .",
      "i enjoyed the acting and the quiet humor throughout .",
      "the plot takes a strange turn in the second act .",
      "some scenes drag on longer than they should .",
      "the lead actor gives a strong and honest performance .",
      "i was surprised by how much the ending moved me .",
      "the music carries several scenes that would otherwise fall flat .",
      "a few of the jokes land well but most feel forced .",
      "the director clearly cares about small visual details .",
      "the story follows a family through one difficult summer .",
      "i would recommend this film to anyone who enjoys slow cinema .",
      "the pacing in the first hour tests your patience .",
      "the script gives every character a moment to shine .",
      "nothing about the premise is new but the execution is clean .",
      "the camera lingers on faces longer than expected .",
      "i found the villain more interesting than the hero .",
      "the second half rewards the viewers who stay with it .",
      "my favorite scene takes place in the empty train station .",
      "the dialogue sounds natural and never feels written .",
      "this is the kind of film that grows on you .",
      "the opening scene sets a tone the rest never matches .",
      "i kept waiting for the story to find its focus .",
      "the supporting cast does solid work with thin material .",
      "the film looks beautiful even when the story stumbles .",
      "a stronger edit would cut twenty minutes without losing anything .",
      "the romance subplot feels tacked on and unnecessary .",
      "i admired the ambition even when the ideas outran the budget .",
      "the final act answers questions i did not care about .",
      "children in the audience laughed at every small gag .",
      "the book handles the same material with more grace .",
      "i walked out feeling lighter than when i walked in .",
      "the sequel improves on the original in almost every way .",
      "some viewers will find the ending too tidy .",
      "the film never explains the rules of its own world .",
      "i liked how the city itself becomes a character .",
      "the humor is dry and the timing is sharp .",
      "every frame looks like a painting from the period .",
      "the actors share an easy chemistry that sells the friendship .",
      "the story asks hard questions and trusts the audience .",
      "i have seen this film three times and it still works .",
  };
  return s;
}

inline lmstego::Corpus corpus() {
  lmstego::Corpus c;
  c.name = "fixture";
  std::string joined;
  for (const auto& s : sentences()) {
    joined += s;
    joined += '\n';
  }
  c.digest = lmstego::digest_hex(joined);
  c.sentences = sentences();
  return c;
}

// A second corpus with a disjoint topic and vocabulary, for mismatch and
// divergence fixtures.
inline const std::vector<std::string>& other_sentences() {
  static const std::vector<std::string> s = {
      "fresh bread needs only flour water salt and patience .",
      "knead the dough until it springs back under your thumb .",
      "let the starter rest overnight near a warm window .",
      "steam in the oven gives the crust its deep color .",
      "a sharp blade scores the loaf before baking .",
      "cold butter folds into the pastry in thin layers .",
      "the crumb should look open and slightly glossy .",
      "weigh every ingredient instead of trusting cups .",
      "stale bread makes the best toast and the best pudding .",
      "a cast iron pot traps steam better than any tray .",
      "wild yeast works slower but tastes far richer .",
      "rest the baked loaf an hour before slicing .",
      "rye flour drinks more water than wheat flour .",
      "honey in the dough browns the crust quickly .",
      "a dusting of rice flour keeps the basket clean .",
      "long fermentation builds flavor no shortcut can match .",
  };
  return s;
}

inline lmstego::Corpus other_corpus() {
  lmstego::Corpus c;
  c.name = "bakery";
  std::string joined;
  for (const auto& s : other_sentences()) {
    joined += s;
    joined += '\n';
  }
  c.digest = lmstego::digest_hex(joined);
  c.sentences = other_sentences();
  return c;
}

}  // namespace fixture
