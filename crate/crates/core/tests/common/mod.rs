#![allow(dead_code)]

pub mod oracle;

pub const BEAT_GRAMMAR: &str = "
len-len:[
  p(P1,1-1:[normal,abnormal]),
  suc(P1,R0), qrs(R1,1-1:[normal,abnormal]),
  suc(R1,P1),
  0-len:[rr(R0,R1,1-1:[short,normal,long]),
         pr(P1,R1,1-1:[short,normal,long])],
  0-len:[
    len-len:[p(P2,1-1:[normal,abnormal]),
             suci(P2,R1),
             pp(P1,P2,1-1:[short,normal,long])],
    len-len:[qrs(R2,1-1:[normal,abnormal]),
             suc(R2,R1),
             0-1:[rr(R1,R2,1-1:[short,normal,long])]]]
]";

/// The first example rule, argument patterns aligned with the grammar.
pub const BEAT_RULE_X: &str =
    "class(x) :- p(P1,normal), suc(P1,R0), qrs(R1,abnormal), suc(R1,P1), pr(P1,R1,short).";

/// The second example rule, argument patterns aligned with the grammar.
pub const BEAT_RULE_Y: &str = "class(y) :- p(P1,normal), suc(P1,R0), qrs(R1,normal), suc(R1,P1), \
     pr(P1,R1,long), p(P2,abnormal), suci(P2,R1), pp(P1,P2,short), qrs(R2,abnormal), suc(R2,R1).";
