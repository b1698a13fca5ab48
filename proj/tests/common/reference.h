#pragma once

// Reference enclosures used as oracles. A trailing '?' means the last digit is ±1.

#include <string>
#include <vector>

namespace ref {

// (λ₀, μ, r12, r13, r14, r23, r24, r34) and m at the four certified bifurcations.
struct Point {
  std::vector<std::string> x;
  std::string m;
};

inline const Point fold3{{"4.10486749931246396567394557?", "0.7904883951465367?", "0.98742601345653?",
                          "0.57921860462471?", "1.00549177029900?", "0.57921860462471?", "1.00549177029900?",
                          "0.57304559793134?"},
                         "1.00266054757261000068580350?"};

inline const Point pitch3{{"4.07733304636361696432719?", "0.777155400247894593452215?", "1.013474951606110121651278?",
                           "0.57621299527180?", "0.995153301920946?", "0.57621299527180?", "0.995153301920946?",
                           "0.582177257875351248071238?"},
                          "0.99184227439094091554349?"};

inline const Point fold2{{"4.08429981829230230011485100912356858215517?", "0.78045312314450202651992?",
                          "0.5737849085182166770049?", "0.58001687737574791204967?", "0.58001687737574791204967?",
                          "1.0069084529737404291463?", "1.0069084529737404291463?", "0.9886256052963805814736?"},
                         "0.997294013195487928197522256274082374264547?"};

inline const Point pitch2{{"4.0585641815314330056739142?", "0.7731895057295255894879076?",
                           "1.0130295438471170352477195?", "0.57621036528654983921809171?",
                           "0.99527106304736638582196968?", "0.57621036528654983921809171?",
                           "0.99527106304736638582196968?", "0.58204027784245088387823969?"},
                          "0.9922994477523853474498458?"};

// Kernel vectors at fold3 (v, w) and the displayed v entries at pitch3.
inline const std::vector<std::string> fold3_v{"-0.179026448?",  "2.989514215?",   "-0.5496816801?",
                                              "-1.4331568126?", "-0.5496816801?", "-1.4331568126?"};
inline const std::vector<std::string> fold3_w{"-0.235312131?",   "1.0068617795?",  "-0.5380276784?",
                                              "-0.46549501352?", "-0.5380276784?", "-0.46549501352?"};
inline const std::vector<std::string> fold2_w{"-0.23318293319421040?",   "0.990420115347107375?",
                                              "-0.533270542375855490?",  "-0.533270542375855490?",
                                              "-0.4619301897243832226?", "-0.4619301897243832226?"};
inline const std::string pitch3_v4 = "0.34810374597?";
inline const std::string pitch3_v6 = "-0.348103745971?";
inline const std::string pitch2_v4 = "0.3503863414744728128369?";
inline const std::string pitch2_w4 = "1.045364602949539555131?";

// Sotomayor quantities.
inline const std::string fold3_q1 = "-6.501134640?", fold3_q3 = "-2066.64414?";
inline const std::string pitch3_q2 = "34.944523147?", pitch3_q4 = "-2636.629585?";
inline const std::string fold2_q1 = "6.32247017553985546?", fold2_q3 = "-227.08976277782379?";
inline const std::string pitch2_q2 = "27.1877227151147526097?", pitch2_q4 = "-2639.9736664601674948?";

}  // namespace ref
