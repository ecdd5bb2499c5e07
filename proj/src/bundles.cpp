#include <stdexcept>

#include "cds/dsl.hpp"

namespace cds {

namespace {

constexpr const char* kListTheory = R"(% Linked list theory.
#fluent edge/2 reach/1 suffix/1 list/0 present/1.
#static key/2.
#sentinel h t.
#root list.

% List structural definition
list :- edge(h, X), key(h, Kh), key(X, Kx), Kh < Kx, suffix(X).
suffix(t).
suffix(X) :- edge(X, Y), key(X, Kx), key(Y, Ky), Kx < Ky, suffix(Y).

% Reachability definition
reach(h).
reach(X) :- edge(Y, X), reach(Y).

% Keys present definition
present(K) :- reach(X), key(X, K).
)";

constexpr const char* kListKnowledge = R"(% Sequential linked list knowledge.
% Kt is the operation's argument key.
#op member.
#op ins block1
    pre [reach(x), suffix(y), edge(x,y), key(x,Kx), key(y,Ky), key(tau,Kt), Kx < Kt, Kt < Ky]
    post [reach(tau), edge(tau,y), edge(x,tau)]
    steps [link(x,tau), link(tau,y)].
#op del block1
    pre [reach(x), suffix(z), edge(x,y), edge(y,z), key(y,Ky), Kt = Ky]
    post [not reach(y), edge(x,z)]
    steps [link(x,z)].
#traverse member descend [edge(X,Y), key(X,Kx), Kx < K].
)";

// Shared by both tree theories.
constexpr const char* kTreeCommon = R"(
reach(h).
reach(X) :- edge(Y, X, D), reach(Y).
hasl(X) :- edge(X, Y, left).
hasr(X) :- edge(X, Y, right).
lsub(X, Y) :- edge(X, Y, left).
lsub(X, Z) :- lsub(X, Y), edge(Y, Z, D).
rsub(X, Y) :- edge(X, Y, right).
rsub(X, Z) :- rsub(X, Y), edge(Y, Z, D).

% Search order, cycles and sharing among reachable nodes.
bad :- reach(X), lsub(X, Z), key(X, Kx), key(Z, Kz), Kx < Kz.
bad :- reach(X), rsub(X, Z), key(X, Kx), key(Z, Kz), Kz < Kx.
bad :- reach(X), lsub(X, X).
bad :- reach(X), rsub(X, X).
bad :- reach(X), reach(Y), edge(X, Z, D), edge(Y, Z, E), key(X, Kx), key(Y, Ky), Kx < Ky.
bad :- reach(X), edge(X, Z, left), edge(X, Z, right).

% visits(T, X): a search for T's key passes through X.
visits(T, h) :- key(T, Kt).
visits(T, Y) :- visits(T, X), edge(X, Y, left), key(X, Kx), key(T, Kt), Kt < Kx.
visits(T, Y) :- visits(T, X), edge(X, Y, right), key(X, Kx), key(T, Kt), Kx < Kt.
)";

constexpr const char* kInternalBstHead = R"(% Internal binary search tree hanging off the left of sentinel h.
#fluent edge/3 reach/1 hasl/1 hasr/1 lsub/2 rsub/2 bad/0 tree/0 visits/2 present/1.
#static key/2.
#sentinel h=max.
#root tree.
#shape tree.
)";

constexpr const char* kInternalBstTail = R"(
tree :- reach(h), not bad.
present(K) :- reach(X), key(X, K).
)";

constexpr const char* kInternalBstKnowledge = R"(% Sequential internal BST knowledge.
#op member.
#op ins left
    pre [reach(x), visits(tau,x), not hasl(x), key(x,Kx), key(tau,Kt), Kt < Kx]
    post [reach(tau), edge(x,tau,left)]
    steps [link(x,tau,left)].
#op ins right
    pre [reach(x), visits(tau,x), not hasr(x), key(x,Kx), key(tau,Kt), Kx < Kt]
    post [reach(tau), edge(x,tau,right)]
    steps [link(x,tau,right)].
#op del leaf_left
    pre [reach(p), edge(p,y,left), not hasl(y), not hasr(y), key(y,Ky), Kt = Ky]
    post [not reach(y), not hasl(p)]
    steps [link(p,nil,left)].
#op del leaf_right
    pre [reach(p), edge(p,y,right), not hasl(y), not hasr(y), key(y,Ky), Kt = Ky]
    post [not reach(y), not hasr(p)]
    steps [link(p,nil,right)].
% Two children; the in-order successor s is the leftmost child of y's right
% child and is relocated into y's position.
#op del two_child
    pre [reach(p), edge(p,y,left), edge(y,yl,left), edge(y,yr,right), edge(yr,s,left),
         not hasl(s), not hasr(s), key(y,Ky), Kt = Ky]
    post [not reach(y), edge(p,s,left), edge(s,yl,left), edge(s,yr,right), not hasl(yr)]
    steps [link(yr,nil,left), link(s,yl,left), link(s,yr,right), link(p,s,left)].
#traverse member descend [edge(X,Y,left), key(X,Kx), K < Kx] descend [edge(X,Y,right), key(X,Kx), Kx < K].
)";

constexpr const char* kExternalBstHead = R"(% External (leaf-oriented) BST: routing nodes have exactly two children,
% keys live in the leaves.
#fluent edge/3 reach/1 hasl/1 hasr/1 leaf/1 lsub/2 rsub/2 bad/0 tree/0 visits/2 present/1.
#static key/2.
#sentinel h=max.
#root tree.
#shape full_tree.
)";

constexpr const char* kExternalBstTail = R"(
leaf(X) :- key(X, K), not hasl(X), not hasr(X).
bad :- reach(Y), edge(Y, X, D), hasl(X), not hasr(X).
bad :- reach(Y), edge(Y, X, D), hasr(X), not hasl(X).
tree :- reach(h), not bad.
present(K) :- reach(X), leaf(X), key(X, K).
)";

constexpr const char* kExternalBstKnowledge = R"(% Sequential external BST knowledge.
% Insert replaces leaf l by a fresh router r over l and the fresh leaf tau.
#op member.
#op ins left_lt fresh [tau, r]
    pre [reach(p), edge(p,l,left), leaf(l), visits(tau,l), key(l,Kl), key(tau,Kt), key(r,Kr), Kt < Kr, Kr < Kl]
    post [reach(tau), reach(l), edge(p,r,left), edge(r,tau,left), edge(r,l,right)]
    steps [link(r,tau,left), link(r,l,right), link(p,r,left)].
#op ins left_gt fresh [tau, r]
    pre [reach(p), edge(p,l,left), leaf(l), visits(tau,l), key(l,Kl), key(tau,Kt), key(r,Kr), Kl < Kr, Kr < Kt]
    post [reach(tau), reach(l), edge(p,r,left), edge(r,l,left), edge(r,tau,right)]
    steps [link(r,l,left), link(r,tau,right), link(p,r,left)].
#op ins right_lt fresh [tau, r]
    pre [reach(p), edge(p,l,right), leaf(l), visits(tau,l), key(l,Kl), key(tau,Kt), key(r,Kr), Kt < Kr, Kr < Kl]
    post [reach(tau), reach(l), edge(p,r,right), edge(r,tau,left), edge(r,l,right)]
    steps [link(r,tau,left), link(r,l,right), link(p,r,right)].
#op ins right_gt fresh [tau, r]
    pre [reach(p), edge(p,l,right), leaf(l), visits(tau,l), key(l,Kl), key(tau,Kt), key(r,Kr), Kl < Kr, Kr < Kt]
    post [reach(tau), reach(l), edge(p,r,right), edge(r,l,left), edge(r,tau,right)]
    steps [link(r,l,left), link(r,tau,right), link(p,r,right)].
% Delete removes leaf l and its parent router r, splicing the sibling s
% into r's place under the grandparent g.
#op del left_left
    pre [reach(g), edge(g,r,left), edge(r,l,left), edge(r,s,right), leaf(l), key(l,Kl), Kt = Kl]
    post [not reach(l), not reach(r), edge(g,s,left)]
    steps [link(g,s,left)].
#op del left_right
    pre [reach(g), edge(g,r,left), edge(r,s,left), edge(r,l,right), leaf(l), key(l,Kl), Kt = Kl]
    post [not reach(l), not reach(r), edge(g,s,left)]
    steps [link(g,s,left)].
#op del right_left
    pre [reach(g), edge(g,r,right), edge(r,l,left), edge(r,s,right), leaf(l), key(l,Kl), Kt = Kl]
    post [not reach(l), not reach(r), edge(g,s,right)]
    steps [link(g,s,right)].
#op del right_right
    pre [reach(g), edge(g,r,right), edge(r,s,left), edge(r,l,right), leaf(l), key(l,Kl), Kt = Kl]
    post [not reach(l), not reach(r), edge(g,s,right)]
    steps [link(g,s,right)].
#traverse member descend [edge(X,Y,left), key(X,Kx), K < Kx] descend [edge(X,Y,right), key(X,Kx), Kx < K].
)";

Bundle make(std::string name, std::string theory_src, std::string knowledge_src) {
  Bundle b;
  b.name = std::move(name);
  b.theory_source = std::move(theory_src);
  b.knowledge_source = std::move(knowledge_src);
  b.theory = parse_theory(b.theory_source);
  b.knowledge = parse_knowledge(b.knowledge_source, b.theory);
  return b;
}

} // namespace

std::vector<std::string> builtin_bundle_names() { return {"linked_list", "external_bst", "internal_bst"}; }

Bundle builtin_bundle(const std::string& name) {
  if (name == "linked_list") return make(name, kListTheory, kListKnowledge);
  if (name == "internal_bst")
    return make(name, std::string(kInternalBstHead) + kTreeCommon + kInternalBstTail, kInternalBstKnowledge);
  if (name == "external_bst")
    return make(name, std::string(kExternalBstHead) + kTreeCommon + kExternalBstTail, kExternalBstKnowledge);
  throw std::invalid_argument("unknown builtin bundle: " + name);
}

} // namespace cds
