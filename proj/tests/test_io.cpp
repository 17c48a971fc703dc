#include <gtest/gtest.h>

#include <algorithm>

#include "gsp/io.hpp"

using namespace gsp;
using namespace gsp::io;

TEST(EdgeList, ParsesCommentsAndBlankLines) {
  auto e = parse_edge_list("# header\na b\n\n  b\tc   # trailing\r\n", "g.edges");
  ASSERT_EQ(e.edges.size(), 2u);
  EXPECT_EQ(e.edges[0], std::make_pair(std::string("a"), std::string("b")));
  EXPECT_EQ(e.edges[1], std::make_pair(std::string("b"), std::string("c")));
  EXPECT_EQ(e.lines[1], 4u);
}

TEST(EdgeList, MalformedLineNamed) {
  try {
    parse_edge_list("a b\na b c\n", "g.edges");
    FAIL();
  } catch (const ParseError& err) {
    EXPECT_EQ(err.line(), 2u);
    EXPECT_NE(std::string(err.what()).find("g.edges:2"), std::string::npos);
  }
  EXPECT_THROW(parse_edge_list("lonely\n", "g"), ParseError);
}

TEST(NodeTable, HeadersAndColumns) {
  auto t = parse_node_table("node,c\nx,1.5\ny,0\n", "n.csv");
  EXPECT_EQ(t.ids, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(t.c, (std::vector<double>{1.5, 0}));
  EXPECT_TRUE(t.b.empty());
  auto u = parse_node_table("node,c,b\nx,1,2\n", "n.csv");
  EXPECT_EQ(u.b, (std::vector<double>{2}));
}

TEST(NodeTable, Errors) {
  EXPECT_THROW(parse_node_table("id,c\nx,1\n", "n"), ParseError);
  EXPECT_THROW(parse_node_table("node,c\nx,1\nx,2\n", "n"), ParseError);
  EXPECT_THROW(parse_node_table("node,c\nx,abc\n", "n"), ParseError);
  EXPECT_THROW(parse_node_table("node,c\nx,1e999\n", "n"), ParseError);
  EXPECT_THROW(parse_node_table("node,c\nx,1,2\n", "n"), ParseError);
  EXPECT_THROW(parse_node_table("node,c\n", "n"), ParseError);
  EXPECT_THROW(parse_node_table("", "n"), ParseError);
  try {
    parse_node_table("node,c,b\na,1,1\nb,2\n", "n.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(BuildGraph, MapsIdsInNodeFileOrder) {
  auto nodes = parse_node_table("node,c\nzeta,1\nalpha,2\nmid,3\n", "n");
  auto edges = parse_edge_list("alpha zeta\nmid alpha\n", "e");
  Graph g = build_graph(edges, nodes, "e");
  EXPECT_EQ(g.num_nodes(), 3);
  EXPECT_EQ(g.num_edges(), 2);
  auto n1 = g.neighbors(1);
  std::vector<int> got(n1.begin(), n1.end());
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<int>{0, 2}));
}

TEST(BuildGraph, UnknownNodeIsDimensionMismatch) {
  auto nodes = parse_node_table("node,c\na,1\nb,1\n", "n");
  EXPECT_THROW(build_graph(parse_edge_list("a q\n", "e"), nodes, "e"), DimensionError);
  EXPECT_THROW(build_graph(parse_edge_list("a a\n", "e"), nodes, "e"), ParseError);
}

TEST(Format, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  std::vector<std::string> ids{"a", "b"};
  std::vector<double> c{0.1, 2};
  auto text = node_file_text(ids, c);
  auto t = parse_node_table(text, "n");
  EXPECT_EQ(t.c, c);
  EXPECT_EQ(parse_id_list("a\n# x\n\nb\n"), ids);
}
