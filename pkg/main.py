#!/usr/bin/env python3
"""거푸집 부재 간격 측정 CLI 엔트리포인트

포인트 클라우드에서 스터드/월레/타이/브레이스 간격을 측정하고 기준값과 비교합니다.
종료 코드: 0 성공, 2 입력/검증 오류, 3 기하/파이프라인 실패
"""

import argparse
import logging
import sys
from pathlib import Path

# 프로젝트 루트를 path에 추가
sys.path.insert(0, str(Path(__file__).parent))

from src.errors import FormworkError, InputError
from src.export import read_report, write_report, write_table
from src.ingest import read_config, read_ply, read_references, write_ply
from src.pipeline import MeasurementPipeline, dump_stages
from src.spacing import build_report, summarize_cases
from src.synth import generate_scene, read_scene_spec, run_benchmark, write_ground_truth

logger = logging.getLogger("formwork")


def cmd_synth(args) -> int:
    spec = read_scene_spec(args.spec)
    cloud, truth = generate_scene(spec)
    write_ply(cloud, args.out_cloud)
    write_ground_truth(truth, args.out_truth)
    print(f"장면 생성: {args.out_cloud} ({len(cloud)}개 점), 정답: {args.out_truth}")
    return 0


def cmd_measure(args) -> int:
    cfg = read_config(args.config)
    cloud = read_ply(args.cloud)
    references = read_references(args.refs) if args.refs else None
    case_label = args.case or Path(args.cloud).stem

    result = MeasurementPipeline(cfg).run(cloud, references=references, case_label=case_label)

    if args.dump_stages:
        paths = dump_stages(result["stages"], args.dump_stages)
        logger.info(f"단계 클라우드 {len(paths)}개 저장: {args.dump_stages}")

    if not result["success"]:
        print(f"오류: {result['error']}", file=sys.stderr)
        return result["exit_code"]

    report = result["report"]
    write_report(report, args.out_report, format=args.format)

    counts = result["members"].counts()
    print(
        f"측정 완료: {', '.join(f'{c.title} {n}' for c, n in counts.items())} "
        f"-> {len(report.results)}개 쌍 ({result['execution_info']['elapsed_ms']:.0f} ms)"
    )
    if report.all_block is not None:
        print(f"All: MAE {report.all_block.mae_mm:.2f} mm, MAPE {report.all_block.mape_pct:.2f}%")
    return 0


def cmd_compare(args) -> int:
    measured = read_report(args.report)
    references = read_references(args.refs)
    report = build_report(measured.results, references, measured.case_label)
    write_report(report, args.out, format=args.format)

    for block in list(report.blocks.values()) + [report.all_block]:
        print(f"{block.name}: MAE {block.mae_mm:.2f} mm, MAPE {block.mape_pct:.2f}% (n={block.n})")
    return 0


def cmd_summary(args) -> int:
    reports = [read_report(path) for path in args.reports]
    table = summarize_cases(reports)
    write_table(table, args.out, index=True)
    print(table.to_string())
    return 0


def cmd_benchmark(args) -> int:
    spec = read_scene_spec(args.spec)
    cfg = read_config(args.config)
    if args.seeds < 1:
        raise InputError("--seeds must be >= 1")

    result = run_benchmark(spec, cfg, range(args.seeds), max_workers=args.workers)
    if args.out:
        write_table(result["runs"], args.out)

    summary = result["summary"]
    mae = summary["pooled_mae_mm"]
    print(
        f"벤치마크: {summary['count_correct']}/{summary['runs']}회 개수 일치, "
        f"통합 MAE {'-' if mae is None else f'{mae:.2f} mm'} ({summary['elapsed_ms']:.0f} ms)"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Formwork Spacing - 포인트 클라우드 기반 거푸집 부재 간격 측정",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
        예시:
          # 합성 장면 생성
          python main.py synth data/scene_objective1.yaml out/scene.ply out/truth.json

          # 간격 측정 (정답 파일을 기준값으로 사용, 단계별 PLY 저장)
          python main.py measure out/scene.ply data/pipeline_config.json out/report.json \\
              --refs out/truth.json --dump-stages out/stages

          # 기존 보고서에 기준값 비교 추가
          python main.py compare out/report.json refs.json out/compared.json
        """,
    )

    parser.add_argument(
        "--verbose",
        action="store_true",
        help="상세 로그 출력 (INFO)",
    )

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("synth", help="합성 장면 + 정답 생성")
    p.add_argument("spec", help="장면 설명 파일 (YAML/JSON)")
    p.add_argument("out_cloud", help="출력 PLY 경로")
    p.add_argument("out_truth", help="출력 정답 JSON 경로")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("measure", help="포인트 클라우드에서 부재 간격 측정")
    p.add_argument("cloud", help="입력 ASCII PLY")
    p.add_argument("config", help="파이프라인 설정 (JSON/YAML)")
    p.add_argument("out_report", help="출력 보고서 경로 (.json 또는 .csv)")
    p.add_argument("--refs", help="기준값 또는 정답 파일")
    p.add_argument("--dump-stages", metavar="DIR", help="단계별 PLY 저장 디렉토리")
    p.add_argument("--case", help="케이스 라벨 (기본: 클라우드 파일 이름)")
    p.add_argument("--format", choices=["json", "csv"], help="보고서 형식 (기본: 확장자)")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("compare", help="보고서와 기준값 비교 (MAE/MAPE)")
    p.add_argument("report", help="measure가 만든 JSON 보고서")
    p.add_argument("refs", help="기준값 또는 정답 파일")
    p.add_argument("out", help="출력 보고서 경로")
    p.add_argument("--format", choices=["json", "csv"], help="보고서 형식 (기본: 확장자)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("summary", help="여러 케이스 보고서 요약 표")
    p.add_argument("reports", nargs="+", help="비교 지표가 있는 JSON 보고서들")
    p.add_argument("--out", required=True, help="출력 CSV 경로")
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("benchmark", help="여러 시드로 합성 장면 반복 측정")
    p.add_argument("spec", help="장면 설명 파일")
    p.add_argument("config", help="파이프라인 설정")
    p.add_argument("--seeds", type=int, default=5, help="시드 개수 (0..N-1, 기본: 5)")
    p.add_argument("--workers", type=int, default=4, help="최대 병렬 워커 수 (기본: 4)")
    p.add_argument("--out", help="시드별 결과 CSV 경로")
    p.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    if not getattr(args, "func", None):
        parser.print_help()
        print("\n오류: 하위 명령이 필요합니다.", file=sys.stderr)
        return 2

    try:
        return args.func(args)

    except FormworkError as e:
        print(f"오류: {e}", file=sys.stderr)
        return e.exit_code

    except OSError as e:
        print(f"오류: {e}", file=sys.stderr)
        return 2

    except KeyboardInterrupt:
        print("\n\n중단됨", file=sys.stderr)
        return 130

    except Exception as e:
        print(f"오류: {e}", file=sys.stderr)
        if args.verbose:
            import traceback
            traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
