#pragma once

#include <string>

namespace idp::test {

// The "all animals fly" example: two animals, only the eagle flies.
inline const std::string kPenguinVocabulary = R"(vocabulary V {
    type Animal
    fly(Animal)
}
)";

inline const std::string kPenguinTheory = R"(theory T : V {
    !x: fly(x).
}
)";

inline const std::string kPenguinStructure = R"(structure S : V {
    Animal = { penguin; eagle }
    fly = { eagle }
}
)";

inline const std::string kPenguinProgram = kPenguinVocabulary + "\n" + kPenguinTheory + "\n" + kPenguinStructure;

// Same vocabulary and theory, but nothing is known about fly.
inline const std::string kPenguinOpenStructure = R"(structure S : V {
    Animal = { penguin; eagle }
}
)";

inline const std::string kPenguinConsistentProgram =
    kPenguinVocabulary + "\n" + kPenguinTheory + "\n" + kPenguinOpenStructure;

}  // namespace idp::test
